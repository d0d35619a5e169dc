"""Long-timescale bandwidth selection.

Given the reported road-traffic density, picks the system bandwidth so the
worst-case (road-edge, equal-power) transmission latency equals a fraction
delta of the channel coherence time. The constraint reduces to a quadratic in
sqrt(B) whose feasible root is available in closed form; the bisection oracle
in numerics is used by the tests to validate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelConfig, Precoder, worst_case_pathloss
from .errors import DomainError
from .fbl import LOG2_E, latency_from_sinr
from .numerics import gaussian_q_inv
from .road_traffic import TrafficModel, coherence_time


@dataclass(frozen=True)
class Stage1Inputs:
    """Worst-case QoS envelope for the bandwidth decision.

    worst_reliability is the strictest (minimum) reliability over the served
    VUEs, worst_rate the largest target rate, chi_th the minimum estimation
    accuracy. delta bounds the latency as a fraction of the coherence time
    (1/20 and 1/40 are the conventional presets; any value in (0, 1) works).
    """

    density: float  # vehicles/m
    delta: float
    worst_reliability: float
    worst_rate: float  # bits/s
    chi_th: float
    precoder: Precoder
    antennas: int

    def __post_init__(self) -> None:
        if self.density <= 0.0:
            raise DomainError("density must be positive")
        if not (0.0 < self.delta < 1.0):
            raise DomainError("delta must lie in (0, 1)")
        if not (0.0 < self.worst_reliability < 0.5):
            raise DomainError("worst_reliability must lie in (0, 0.5)")
        if self.worst_rate <= 0.0:
            raise DomainError("worst_rate must be positive")
        if not (0.0 < self.chi_th <= 1.0):
            raise DomainError("chi_th must lie in (0, 1]")
        if self.antennas < 2:
            raise DomainError("antennas must be at least 2")


@dataclass(frozen=True)
class Stage1Result:
    """Outcome of the bandwidth selection at one reported density."""

    gamma_w: float  # worst-case effective SINR (bandwidth-independent)
    discriminant: float
    bandwidth: float  # Hz
    total_power: float  # W, P_0 * B
    coherence_time: float  # s
    worst_latency: float  # s, equals delta * coherence_time at the optimum


def worst_case_sinr(
    inputs: Stage1Inputs, cfg: ChannelConfig, traffic: TrafficModel
) -> float:
    """Worst-case effective SINR under equal power p = P_0 B / (rho d_R).

    The substitution makes the value independent of the bandwidth. The VUE
    count enters as the real number rho * d_R (unrounded), matching the
    long-term model.
    """
    m = float(inputs.antennas)
    k_real = inputs.density * cfg.road_length
    beta_w = worst_case_pathloss(cfg)
    p0 = cfg.signal_psd
    n0 = cfg.noise_psd
    impair = (p0 * beta_w * (1.0 - inputs.chi_th) + m * n0) / (
        inputs.chi_th * beta_w
    )
    if inputs.precoder is Precoder.MF:
        return m * p0 / (p0 * (k_real - 1.0) + impair * k_real * m / (m - 1.0))
    if m <= k_real:
        raise DomainError(
            f"ZF requires antennas > rho*d_R, got M={inputs.antennas}, "
            f"rho*d_R={k_real}"
        )
    return (p0 / k_real) * inputs.chi_th * beta_w * (m - k_real) / (
        p0 * beta_w * (1.0 - inputs.chi_th) + m * n0
    )


def worst_case_latency(
    inputs: Stage1Inputs, gamma_w: float, bandwidth: float
) -> float:
    """Worst-case latency at a candidate bandwidth; strictly decreasing in B
    on the feasible domain and diverging at the rate-infeasibility pole."""
    return latency_from_sinr(
        gamma_w, inputs.worst_rate, inputs.worst_reliability, bandwidth
    )


def optimal_bandwidth(
    inputs: Stage1Inputs, cfg: ChannelConfig, traffic: TrafficModel
) -> Stage1Result:
    """Closed-form bandwidth meeting the latency budget with equality.

    Solving L_W(B) = delta * T_C as a quadratic in sqrt(B) and taking the
    larger (+sqrt(discriminant)) root, which is the one satisfying the rate
    feasibility B log2(1+Gamma_W) > R_W.
    """
    gamma_w = worst_case_sinr(inputs, cfg, traffic)
    t_c = coherence_time(traffic, inputs.density)
    budget = inputs.delta * t_c
    qinv = gaussian_q_inv(inputs.worst_reliability)
    t = 1.0 + gamma_w
    spread = 1.0 - 1.0 / (t * t)
    log_term = math.log2(t)
    disc = (qinv * qinv) * (LOG2_E * LOG2_E) * spread + (
        4.0 * budget * log_term * inputs.worst_rate
    )
    root = (qinv * LOG2_E * math.sqrt(spread) + math.sqrt(disc)) / (
        2.0 * math.sqrt(budget) * log_term
    )
    bandwidth = root * root
    return Stage1Result(
        gamma_w=gamma_w,
        discriminant=disc,
        bandwidth=bandwidth,
        total_power=cfg.signal_psd * bandwidth,
        coherence_time=t_c,
        worst_latency=worst_case_latency(inputs, gamma_w, bandwidth),
    )
