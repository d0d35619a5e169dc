"""Macroscopic road-traffic model: speed-density law, VUE count, Doppler shift
and channel coherence time.

The speed-density relation is the Underwood law v = v_F * exp(-rho/rho_m),
which drives both the number of served vehicles (K = rho * d_R) and the
mobility-induced Doppler spread of the downlink.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError

#: Propagation speed used for Doppler conversion, m/s.
LIGHT_SPEED = 2.998e8

_COHERENCE_FACTOR = 3.0 / (4.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class TrafficModel:
    """Road segment and mobility parameters (SI units)."""

    free_flow_speed: float  # m/s
    max_density: float  # vehicles/m
    road_length: float  # m
    carrier_frequency: float  # Hz
    light_speed: float = LIGHT_SPEED  # m/s

    def __post_init__(self) -> None:
        if self.free_flow_speed <= 0.0:
            raise DomainError("free_flow_speed must be positive")
        if self.max_density <= 0.0:
            raise DomainError("max_density must be positive")
        if self.road_length <= 0.0:
            raise DomainError("road_length must be positive")
        if self.carrier_frequency <= 0.0:
            raise DomainError("carrier_frequency must be positive")
        if self.light_speed <= 0.0:
            raise DomainError("light_speed must be positive")


def _check_density(rho: float) -> None:
    if rho < 0.0:
        raise DomainError(f"density must be nonnegative, got {rho!r}")


def speed(model: TrafficModel, rho: float) -> float:
    """Vehicular speed at density rho, m/s; strictly decreasing in rho."""
    _check_density(rho)
    return model.free_flow_speed * math.exp(-rho / model.max_density)


def flux(model: TrafficModel, rho: float) -> float:
    """Traffic flow rate rho * v(rho), vehicles/s."""
    _check_density(rho)
    return rho * speed(model, rho)


def num_vues(model: TrafficModel, rho: float) -> int:
    """Number of served VUEs on the segment, K = rho * d_R rounded to nearest.

    Warns when rho * d_R is farther than 1e-9 from an integer (the model
    treats the product as exact); raises if the count would be below 1.
    """
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho!r}")
    exact = rho * model.road_length
    k = round(exact)
    if abs(exact - k) > 1e-9:
        warnings.warn(
            f"rho * d_R = {exact!r} is not integral; rounding to {k}",
            stacklevel=2,
        )
    if k < 1:
        raise DomainError(f"rho * d_R = {exact!r} yields fewer than one VUE")
    return int(k)


def max_doppler(model: TrafficModel, rho: float) -> float:
    """Maximum Doppler frequency f_C * v(rho) / c, Hz."""
    _check_density(rho)
    return model.carrier_frequency * speed(model, rho) / model.light_speed


def coherence_time(model: TrafficModel, rho: float) -> float:
    """Channel coherence time 3 / (4 * sqrt(pi) * f_MD), seconds.

    Strictly increasing in rho because the speed (hence Doppler) decreases.
    """
    f_md = max_doppler(model, rho)
    if f_md == 0.0:
        raise DomainError("coherence time undefined at zero Doppler frequency")
    return _COHERENCE_FACTOR / f_md


def kmh_to_ms(v_kmh: float) -> float:
    """Convert km/h to m/s (config boundary helper)."""
    return v_kmh / 3.6
