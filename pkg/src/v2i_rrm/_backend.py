"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
pure-Python twin takes over. Set V2I_RRM_KERNELS=py or =c before import to
force a backend (useful for the benchmark and for parity tests).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None


def get_kernels(name: str | None = None) -> ModuleType:
    """Kernel module for `name` in {"auto", "c", "py"} (None reads the env)."""
    if name is None:
        name = os.environ.get("V2I_RRM_KERNELS", "auto").lower()
    if name == "py":
        return _kernels_py
    if name == "c":
        if _compiled is None:
            raise ImportError(
                "compiled kernels requested via V2I_RRM_KERNELS=c but the "
                "extension is not built; run `pip install -e . "
                "--no-build-isolation`"
            )
        return _compiled
    if name == "auto":
        return _compiled if _compiled is not None else _kernels_py
    raise ValueError(f"unknown kernel backend {name!r}")


#: Backend chosen at import time (honors V2I_RRM_KERNELS).
KERNELS = get_kernels()


def backend_name(kernels: ModuleType | None = None) -> str:
    """"c" for the compiled extension, "py" for the fallback."""
    mod = KERNELS if kernels is None else kernels
    return "c" if getattr(mod, "COMPILED", False) else "py"
