"""Short-timescale max-min power allocation.

The maximum transmission latency over the served VUEs is minimized through the
equivalent fractional program max_p min_k f_k/g_k with f_k/g_k = -sqrt(L_k):
an outer Dinkelbach iteration drives the auxiliary value
F(eta) = max_p min_k (f_k - eta g_k) to zero, and each subproblem is solved by
a step-halving equalizer that levels the h_k = f_k - eta g_k values across
VUEs. The equalizer inner loop runs on a compiled kernel when available (see
_backend).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import ModuleType
from typing import Sequence

import numpy as np

from ._backend import KERNELS
from ._kernels_py import STATUS_CONVERGED, STATUS_ITERATION_CAP, STATUS_STEP_FLOOR
from .channel import EffectiveSinrModel, Precoder, Vue, effective_sinr, phi
from .errors import (
    AllInfeasibleError,
    ConvergenceError,
    DomainError,
    InfeasibleRateError,
)
from .fbl import FEASIBILITY_GUARD, LOG2_E, latency
from .numerics import gaussian_q_inv

#: Step-halving floor relative to the power budget; reaching it before the
#: spread tolerance returns the best iterate with converged=False instead of
#: erroring (finite precision can stall the rejection logic near optimum).
STEP_FLOOR_FRACTION = 1e-15

DEFAULT_ZETA_P = 1e-2
DEFAULT_ZETA_S = 1e-2
DEFAULT_ETA0 = -3e-2
DEFAULT_MAX_INNER = 100_000
DEFAULT_MAX_OUTER = 100


@dataclass(frozen=True)
class RatioParts:
    """Numerator/denominator of -sqrt(latency) for one VUE.

    numerator = -sqrt(B) Q^{-1}(eps) log2(e) sqrt(1-(1+Gamma)^-2)  (<= 0)
    denominator = B log2(1+Gamma) - R                              (> 0)
    """

    numerator: float
    denominator: float

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator


@dataclass
class EqualizerState:
    """Result of one max-min equalization run."""

    powers: np.ndarray
    objectives: np.ndarray  # h_k at the returned powers
    step: float  # final step length mu
    iterations: int
    converged: bool  # False when the step floor was hit first
    trace: np.ndarray | None = None  # rows (i, max_h, min_h, mu_i)

    @property
    def spread(self) -> float:
        return float(np.max(self.objectives) - np.min(self.objectives))


@dataclass
class AllocationResult:
    """Optimal (or equal-power baseline) allocation and its latencies."""

    powers: np.ndarray
    eta_star: float  # min_k f_k/g_k at the returned powers
    latencies: np.ndarray
    max_latency: float
    outer_iterations: int  # number of Dinkelbach eta updates
    total_inner_iterations: int
    trace: list[tuple[float, float]] = field(default_factory=list)  # (eta_j, F_j)
    inner_traces: list[np.ndarray] = field(default_factory=list)
    converged: bool = True


def _a_coef(bandwidth: float, reliability: float) -> float:
    """sqrt(B) * Q^{-1}(eps) * log2(e), the latency-penalty scale of one VUE."""
    return math.sqrt(bandwidth) * gaussian_q_inv(reliability) * LOG2_E


def ratio_parts(
    model: EffectiveSinrModel,
    vue: Vue,
    power: float,
    served: int,
    bandwidth: float,
) -> RatioParts:
    """f_k and g_k at one power level; raises when the rate margin g_k <= 0."""
    gamma = effective_sinr(model, vue, power, served)
    t = 1.0 + gamma
    ergodic = bandwidth * math.log2(t)
    margin = ergodic - vue.target_rate
    if margin <= FEASIBILITY_GUARD * ergodic:
        raise InfeasibleRateError(
            f"rate margin nonpositive at power {power:.6g} W "
            f"(ergodic {ergodic:.6g}, target {vue.target_rate:.6g})"
        )
    num = -(_a_coef(bandwidth, vue.reliability) * math.sqrt(1.0 - 1.0 / (t * t)))
    return RatioParts(numerator=num, denominator=margin)


def h_value(
    model: EffectiveSinrModel,
    vue: Vue,
    power: float,
    served: int,
    bandwidth: float,
    eta: float,
) -> float:
    """Dinkelbach objective h_k = f_k - eta g_k; increasing in power for
    eta < 0 and concave there (the equalizer relies on both)."""
    parts = ratio_parts(model, vue, power, served, bandwidth)
    return parts.numerator - eta * parts.denominator


def _kernel_arrays(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    served = len(population)
    phis = np.array([phi(model, v, served) for v in population], dtype=float)
    acoef = np.array(
        [_a_coef(bandwidth, v.reliability) for v in population], dtype=float
    )
    rates = np.array([v.target_rate for v in population], dtype=float)
    return phis, acoef, rates


def _check_equal_power_feasible(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
) -> list[RatioParts]:
    """Equal power must satisfy every rate requirement, else the instance is
    declared infeasible (there is no feasibility-restoration phase)."""
    served = len(population)
    equal = model.total_power / served
    parts = []
    for k, vue in enumerate(population):
        try:
            parts.append(ratio_parts(model, vue, equal, served, bandwidth))
        except InfeasibleRateError as exc:
            raise AllInfeasibleError(
                f"equal power split infeasible for VUE {k}: {exc}"
            ) from exc
    return parts


def equalize_maxmin(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
    eta: float,
    zeta_s: float = DEFAULT_ZETA_S,
    mu0: float | None = None,
    *,
    max_iterations: int = DEFAULT_MAX_INNER,
    record_trace: bool = False,
    kernels: ModuleType = KERNELS,
) -> EqualizerState:
    """Level the h_k values across VUEs at a fixed eta < 0.

    Returns once max h - min h <= zeta_s (converged=True) or once the halving
    step underflows the floor (converged=False, best iterate). Raises
    ConvergenceError at the iteration cap and AllInfeasibleError when the
    equal-power start violates a rate requirement.
    """
    served = len(population)
    if served < 1:
        raise DomainError("population must not be empty")
    if eta >= 0.0:
        raise DomainError("eta must be negative")
    if zeta_s <= 0.0:
        raise DomainError("zeta_s must be positive")
    if mu0 is None:
        mu0 = model.total_power / (2.0 * served)
    if not (0.0 < mu0 < model.total_power):
        raise DomainError("mu0 must lie in (0, total_power)")
    _check_equal_power_feasible(population, model, bandwidth)

    phis, acoef, rates = _kernel_arrays(population, model, bandwidth)
    powers = np.empty(served, dtype=float)
    objectives = np.empty(served, dtype=float)
    if record_trace:
        trace_max = np.empty(max_iterations + 1, dtype=float)
        trace_min = np.empty(max_iterations + 1, dtype=float)
        trace_mu = np.empty(max_iterations + 1, dtype=float)
    else:
        trace_max = np.empty(0, dtype=float)
        trace_min = trace_max
        trace_mu = trace_max

    status, iters, mu, trace_len = kernels.equalize(
        model.precoder is Precoder.MF,
        phis,
        acoef,
        rates,
        bandwidth,
        float(model.antennas),
        model.total_power,
        eta,
        zeta_s,
        mu0,
        max_iterations,
        STEP_FLOOR_FRACTION * model.total_power,
        powers,
        objectives,
        trace_max,
        trace_min,
        trace_mu,
    )
    if status == STATUS_ITERATION_CAP:
        raise ConvergenceError(
            f"equalizer did not reach spread {zeta_s:g} within "
            f"{max_iterations} iterations"
        )
    trace = None
    if record_trace:
        idx = np.arange(trace_len, dtype=float)
        trace = np.column_stack(
            (idx, trace_max[:trace_len], trace_min[:trace_len], trace_mu[:trace_len])
        )
    return EqualizerState(
        powers=powers,
        objectives=objectives,
        step=mu,
        iterations=int(iters),
        converged=status == STATUS_CONVERGED,
        trace=trace,
    )


def _min_ratio(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    powers: np.ndarray,
    bandwidth: float,
) -> float:
    served = len(population)
    return min(
        ratio_parts(model, vue, float(powers[k]), served, bandwidth).ratio
        for k, vue in enumerate(population)
    )


def dinkelbach_allocate(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
    zeta_p: float = DEFAULT_ZETA_P,
    eta0: float = DEFAULT_ETA0,
    mu0: float | None = None,
    *,
    zeta_s: float = DEFAULT_ZETA_S,
    max_outer: int = DEFAULT_MAX_OUTER,
    max_inner: int = DEFAULT_MAX_INNER,
    record_inner_traces: bool = False,
    kernels: ModuleType = KERNELS,
) -> AllocationResult:
    """Minimize the maximum latency by Dinkelbach iteration.

    Each pass solves the max-min subproblem at the current eta, evaluates
    F_j = min_k h_k there, stops once F_j <= zeta_p and otherwise raises eta
    to the subproblem's min ratio. eta0 is clamped to the equal-power ratio
    when the configured value would exceed it, preserving F(eta_0) >= 0. If an
    inner solve fails (within its tolerance) to improve on the incumbent
    allocation, the incumbent is optimal to within the tolerances and the
    iteration stops there; this keeps the recorded trace non-decreasing in eta
    with F_j >= 0 throughout.
    """
    served = len(population)
    if served < 1:
        raise DomainError("population must not be empty")
    if zeta_p <= 0.0:
        raise DomainError("zeta_p must be positive")
    if eta0 >= 0.0:
        raise DomainError("eta0 must be negative")

    parts0 = _check_equal_power_feasible(population, model, bandwidth)
    equal = model.total_power / served
    p_prev = np.full(served, equal, dtype=float)
    eta = min(eta0, min(part.ratio for part in parts0))

    trace: list[tuple[float, float]] = []
    inner_traces: list[np.ndarray] = []
    total_inner = 0
    p_star: np.ndarray | None = None
    converged_flag = True

    for _ in range(max_outer):
        state = equalize_maxmin(
            population,
            model,
            bandwidth,
            eta,
            zeta_s,
            mu0,
            max_iterations=max_inner,
            record_trace=record_inner_traces,
            kernels=kernels,
        )
        total_inner += state.iterations
        converged_flag = converged_flag and state.converged
        if record_inner_traces and state.trace is not None:
            inner_traces.append(state.trace)

        f_j = float(np.min(state.objectives))
        if f_j < 0.0:
            # Inner tolerance kept the solver from improving the incumbent;
            # the incumbent's min ratio equals eta, so F(eta) = 0 there.
            trace.append((eta, 0.0))
            p_star = p_prev
            break
        trace.append((eta, f_j))
        if f_j <= zeta_p:
            p_star = state.powers
            break
        eta = _min_ratio(population, model, state.powers, bandwidth)
        p_prev = state.powers
    if p_star is None:
        raise ConvergenceError(
            f"Dinkelbach iteration did not reach F <= {zeta_p:g} within "
            f"{max_outer} outer iterations"
        )

    eta_star = _min_ratio(population, model, p_star, bandwidth)
    lat = np.array(
        [
            latency(model, vue, float(p_star[k]), served, bandwidth)
            for k, vue in enumerate(population)
        ]
    )
    return AllocationResult(
        powers=p_star,
        eta_star=eta_star,
        latencies=lat,
        max_latency=float(np.max(lat)),
        outer_iterations=len(trace) - 1,
        total_inner_iterations=total_inner,
        trace=trace,
        inner_traces=inner_traces,
        converged=converged_flag,
    )


def epa_allocate(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
) -> AllocationResult:
    """Equal-power baseline p_k = P_B / K with latencies per VUE."""
    served = len(population)
    if served < 1:
        raise DomainError("population must not be empty")
    equal = model.total_power / served
    powers = np.full(served, equal, dtype=float)
    lat = np.array(
        [latency(model, vue, equal, served, bandwidth) for vue in population]
    )
    eta_star = _min_ratio(population, model, powers, bandwidth)
    return AllocationResult(
        powers=powers,
        eta_star=eta_star,
        latencies=lat,
        max_latency=float(np.max(lat)),
        outer_iterations=0,
        total_inner_iterations=0,
    )
