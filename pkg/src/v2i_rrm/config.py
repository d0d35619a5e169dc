"""Configuration loading.

Config files are plain `key = value` lines with `#` comments: every parameter
is a scalar, so no nested format is needed and files stay trivially diffable.
Spectral densities are given in dBm/Hz and speeds in km/h at the file
boundary (the conventional units of the simulation tables) and converted to
SI on load; SystemConfig itself is all-SI.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

from .channel import ChannelConfig
from .errors import ConfigError
from .road_traffic import TrafficModel, kmh_to_ms


def dbm_per_hz_to_w_per_hz(value_dbm: float) -> float:
    """dBm/Hz -> W/Hz via 10^((x - 30)/10)."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """All scenario scalars in SI units.

    Defaults reproduce the reference highway scenario: a 200 m segment, BS
    20 m off the road, 2 GHz carrier, -130 dBm/Hz noise and -10 dBm/Hz signal
    spectral densities, estimation accuracy 0.8, plus the default experiment
    operating point (300 antennas, density 0.05 /m, 100 kbps at 1e-6).
    """

    # Geometry / propagation
    bs_offset: float = 20.0  # m
    road_length: float = 200.0  # m
    gain_constant: float = 1e-3
    pathloss_exponent: float = 3.8
    noise_psd: float = dbm_per_hz_to_w_per_hz(-130.0)  # W/Hz
    signal_psd: float = dbm_per_hz_to_w_per_hz(-10.0)  # W/Hz
    # Mobility
    max_density: float = 0.15  # vehicles/m
    free_flow_speed: float = kmh_to_ms(80.0)  # m/s
    carrier_frequency: float = 2e9  # Hz
    # Operating point
    accuracy: float = 0.8
    antennas: int = 300
    density: float = 0.05  # vehicles/m
    delta: float = 1.0 / 20.0
    target_rate: float = 1e5  # bits/s
    reliability: float = 1e-6
    # Fixed-bandwidth experiments (rate/latency tradeoff, MC validation)
    bandwidth: float = 200e3  # Hz
    total_power: float = 10.0  # W
    mc_latency: float = 1e-3  # s
    # Solver
    zeta_p: float = 1e-2
    zeta_s: float = 1e-2
    eta0: float = -3e-2
    inner_cap: int = 100_000
    outer_cap: int = 100
    # Monte Carlo
    mc_realizations: int = 10_000
    mc_parallel_streams: int = 1

    def traffic_model(self) -> TrafficModel:
        return TrafficModel(
            free_flow_speed=self.free_flow_speed,
            max_density=self.max_density,
            road_length=self.road_length,
            carrier_frequency=self.carrier_frequency,
        )

    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(
            bs_offset=self.bs_offset,
            road_length=self.road_length,
            gain_constant=self.gain_constant,
            pathloss_exponent=self.pathloss_exponent,
            noise_psd=self.noise_psd,
            signal_psd=self.signal_psd,
        )


# file key -> (SystemConfig field, parser, converter)
_FLOAT_KEYS: dict[str, tuple[str, object]] = {
    "bs_offset_m": ("bs_offset", None),
    "road_length_m": ("road_length", None),
    "gain_constant": ("gain_constant", None),
    "pathloss_exponent": ("pathloss_exponent", None),
    "noise_psd_dbm_hz": ("noise_psd", dbm_per_hz_to_w_per_hz),
    "signal_psd_dbm_hz": ("signal_psd", dbm_per_hz_to_w_per_hz),
    "max_density_per_m": ("max_density", None),
    "free_flow_speed_kmh": ("free_flow_speed", kmh_to_ms),
    "carrier_frequency_hz": ("carrier_frequency", None),
    "accuracy": ("accuracy", None),
    "density_per_m": ("density", None),
    "delta": ("delta", None),
    "target_rate_bps": ("target_rate", None),
    "reliability": ("reliability", None),
    "bandwidth_hz": ("bandwidth", None),
    "total_power_w": ("total_power", None),
    "mc_latency_s": ("mc_latency", None),
    "zeta_p": ("zeta_p", None),
    "zeta_s": ("zeta_s", None),
    "eta0": ("eta0", None),
}

_INT_KEYS: dict[str, str] = {
    "antennas": "antennas",
    "inner_cap": "inner_cap",
    "outer_cap": "outer_cap",
    "mc_realizations": "mc_realizations",
    "mc_parallel_streams": "mc_parallel_streams",
}


def _warn_ranges(cfg: SystemConfig) -> None:
    if cfg.pathloss_exponent <= 2.0:
        warnings.warn(
            f"pathloss_exponent = {cfg.pathloss_exponent} is <= 2; the "
            "worst-case geometry assumes a steeper falloff",
            stacklevel=3,
        )
    if not (0.0 < cfg.accuracy <= 1.0):
        warnings.warn(
            f"accuracy = {cfg.accuracy} outside (0, 1]", stacklevel=3
        )
    if not (0.0 < cfg.delta < 1.0):
        warnings.warn(f"delta = {cfg.delta} outside (0, 1)", stacklevel=3)
    if not (0.0 < cfg.reliability < 0.5):
        warnings.warn(
            f"reliability = {cfg.reliability} outside the URLLC range (0, 0.5)",
            stacklevel=3,
        )


def parse_config_text(text: str, source: str = "<string>") -> SystemConfig:
    """Parse `key = value` lines; unknown keys and bad numbers are errors
    carrying the line number and field name."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}"
            )
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in _FLOAT_KEYS:
            field_name, convert = _FLOAT_KEYS[key]
            try:
                number = float(val)
            except ValueError as exc:
                raise ConfigError(
                    f"{source}:{lineno}: field {key!r}: {val!r} is not a number"
                ) from exc
            if not math.isfinite(number):
                raise ConfigError(
                    f"{source}:{lineno}: field {key!r} must be finite"
                )
            values[field_name] = convert(number) if convert else number
        elif key in _INT_KEYS:
            try:
                values[_INT_KEYS[key]] = int(val)
            except ValueError as exc:
                raise ConfigError(
                    f"{source}:{lineno}: field {key!r}: {val!r} is not an integer"
                ) from exc
        else:
            known = sorted(list(_FLOAT_KEYS) + list(_INT_KEYS))
            raise ConfigError(
                f"{source}:{lineno}: unknown key {key!r} (known keys: "
                f"{', '.join(known)})"
            )
    cfg = SystemConfig(**values)  # type: ignore[arg-type]
    _warn_ranges(cfg)
    return cfg


def load_config(path: str | Path | None) -> SystemConfig:
    """Config from a file; None or an empty file yields the full defaults."""
    if path is None:
        return SystemConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {p} does not exist")
    return parse_config_text(p.read_text(), source=str(p))


def config_field_names() -> list[str]:
    return [f.name for f in fields(SystemConfig)]
