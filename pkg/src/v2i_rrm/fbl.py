"""Finite-blocklength rate and latency math.

Centers on the normal approximation R = B [log2(1+g) - sqrt(V/(L B)) Q^{-1}(e)]
with channel dispersion V, its evaluation at the deterministic effective SINR,
and the closed-form inversion that yields the transmission latency needed to
carry a target rate at a target reliability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import EffectiveSinrModel, Vue, effective_sinr
from .errors import DomainError, InfeasibleRateError
from .numerics import gaussian_q_inv

LOG2_E = math.log2(math.e)

#: Relative guard band on the rate-margin denominator; avoids catastrophic
#: cancellation right at the feasibility boundary.
FEASIBILITY_GUARD = 1e-12


@dataclass(frozen=True)
class QosTarget:
    """A rate / reliability / bandwidth triple in the URLLC regime."""

    rate: float  # bits/s
    reliability: float  # error probability, restricted to (0, 0.5)
    bandwidth: float  # Hz

    def __post_init__(self) -> None:
        if self.rate <= 0.0:
            raise DomainError("rate must be positive")
        if not (0.0 < self.reliability < 0.5):
            raise DomainError("reliability must lie in (0, 0.5)")
        if self.bandwidth <= 0.0:
            raise DomainError("bandwidth must be positive")


def dispersion(gamma):
    """Channel dispersion V = (1 - (1+g)^-2) (log2 e)^2; accepts arrays.

    Monotone increasing in gamma and bounded by (log2 e)^2.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise DomainError("gamma must be nonnegative")
    t = 1.0 + g
    v = (1.0 - 1.0 / (t * t)) * (LOG2_E * LOG2_E)
    return float(v) if np.ndim(gamma) == 0 else v


def na_rate(gamma, latency_s: float, reliability: float, bandwidth: float):
    """Normal-approximation rate at blocklength n = L * B; accepts SINR arrays.

    May be negative, which callers interpret as an unachievable operating
    point. At reliability 0.5 the penalty term vanishes and the ergodic value
    B log2(1+g) is returned exactly.
    """
    if latency_s <= 0.0:
        raise DomainError("latency must be positive")
    if bandwidth <= 0.0:
        raise DomainError("bandwidth must be positive")
    if not (0.0 < reliability < 1.0):
        raise DomainError("reliability must lie in (0, 1)")
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise DomainError("gamma must be nonnegative")
    qinv = gaussian_q_inv(reliability)
    v = dispersion(g)
    r = bandwidth * (
        np.log2(1.0 + g) - np.sqrt(v / (latency_s * bandwidth)) * qinv
    )
    return float(r) if np.ndim(gamma) == 0 else r


def effective_rate(
    model: EffectiveSinrModel,
    vue: Vue,
    power: float,
    served: int,
    latency_s: float,
    bandwidth: float,
) -> float:
    """Achievable ergodic rate at the deterministic effective SINR."""
    gamma = effective_sinr(model, vue, power, served)
    return na_rate(gamma, latency_s, vue.reliability, bandwidth)


def latency_from_sinr(
    gamma: float, rate: float, reliability: float, bandwidth: float
) -> float:
    """Transmission latency required to carry `rate` at a given SINR.

    Closed-form inversion of the normal approximation:
        L = [ sqrt(B) Q^{-1}(e) log2(e) sqrt(1-(1+g)^-2) / (B log2(1+g) - R) ]^2
    Raises InfeasibleRateError when the rate margin B log2(1+g) - R is not
    strictly positive (beyond the relative guard band).
    """
    if gamma < 0.0:
        raise DomainError("gamma must be nonnegative")
    if rate <= 0.0:
        raise DomainError("rate must be positive")
    if bandwidth <= 0.0:
        raise DomainError("bandwidth must be positive")
    if not (0.0 < reliability < 1.0):
        raise DomainError("reliability must lie in (0, 1)")
    t = 1.0 + gamma
    ergodic = bandwidth * math.log2(t)
    margin = ergodic - rate
    if margin <= FEASIBILITY_GUARD * ergodic:
        raise InfeasibleRateError(
            f"target rate {rate:.6g} bit/s exceeds what SINR {gamma:.6g} "
            f"supports in {bandwidth:.6g} Hz (ergodic limit {ergodic:.6g})"
        )
    qinv = gaussian_q_inv(reliability)
    num = math.sqrt(bandwidth) * qinv * LOG2_E * math.sqrt(1.0 - 1.0 / (t * t))
    ratio = num / margin
    return ratio * ratio


def latency(
    model: EffectiveSinrModel,
    vue: Vue,
    power: float,
    served: int,
    bandwidth: float,
) -> float:
    """Latency of one VUE at transmit power `power` and the given bandwidth."""
    gamma = effective_sinr(model, vue, power, served)
    return latency_from_sinr(gamma, vue.target_rate, vue.reliability, bandwidth)
