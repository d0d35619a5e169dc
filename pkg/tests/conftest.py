import pytest

from v2i_rrm import SystemConfig


@pytest.fixture(scope="session")
def cfg() -> SystemConfig:
    """Reference scenario (all defaults)."""
    return SystemConfig()
