"""Monte Carlo validation of the deterministic rate approximation.

Samples the scalar channel-quality distributions behind the instantaneous
inverse SINR (a Beta(1, M-1) per interferer for MF plus an inverse-Gamma own
term; a single inverse-Gamma term for ZF), averages the finite-blocklength
rate over realizations and reports the gap to the deterministic prediction.

Realizations are split into fixed-size blocks, each with its own counter-split
substream of the master seed, so the result is a pure function of (seed, n)
no matter how many workers run the blocks.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .channel import EffectiveSinrModel, Precoder, Vue
from .errors import DomainError
from .fbl import effective_rate, na_rate

#: Realizations per RNG substream; fixed so parallelism cannot change results.
BLOCK_SIZE = 16384


@dataclass(frozen=True)
class McConfig:
    """Sampling budget and reproducibility knobs."""

    realizations: int = 10_000
    seed: int = 0
    parallel_streams: int = 1

    def __post_init__(self) -> None:
        if self.realizations < 1:
            raise DomainError("realizations must be at least 1")
        if self.parallel_streams < 1:
            raise DomainError("parallel_streams must be at least 1")


class OmegaKind(enum.Enum):
    """Scalar channel-quality distributions of the instantaneous SINR."""

    BETA_MF = "beta_mf"  # |pairwise direction overlap|^2 ~ Beta(1, M-1)
    INV_GAMMA_MF = "inv_gamma_mf"  # 1/||h||^2 ~ InvGamma(M, 1)
    INV_GAMMA_ZF = "inv_gamma_zf"  # [(HH^H)^-1]_kk ~ InvGamma(M-K+1, 1)


@dataclass(frozen=True)
class OmegaSample:
    kind: OmegaKind
    value: float

    def __post_init__(self) -> None:
        if self.kind is OmegaKind.BETA_MF and not (0.0 < self.value < 1.0):
            raise DomainError("Beta sample must lie in (0, 1)")
        if self.value <= 0.0:
            raise DomainError("omega samples are positive")


@dataclass(frozen=True)
class EmpiricalRate:
    """Sample mean of the per-realization rate with its standard error."""

    rate: float
    stderr: float
    realizations: int


def _check_kind(kind: OmegaKind, antennas: int, served: int) -> None:
    if antennas < 2:
        raise DomainError("antennas must be at least 2")
    if kind is OmegaKind.INV_GAMMA_ZF and antennas < served:
        raise DomainError("ZF sampling requires antennas >= served VUEs")


def _sample_omega_block(
    kind: OmegaKind,
    antennas: int,
    served: int,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    _check_kind(kind, antennas, served)
    if kind is OmegaKind.BETA_MF:
        u = rng.random(size)
        return 1.0 - u ** (1.0 / (antennas - 1))
    if kind is OmegaKind.INV_GAMMA_MF:
        return 1.0 / rng.gamma(float(antennas), 1.0, size)
    return 1.0 / rng.gamma(float(antennas - served + 1), 1.0, size)


def sample_omega(
    kind: OmegaKind, antennas: int, served: int, rng: np.random.Generator
) -> OmegaSample:
    """One draw from the requested channel-quality distribution."""
    value = float(_sample_omega_block(kind, antennas, served, rng, 1)[0])
    return OmegaSample(kind=kind, value=value)


def _inv_sinr_block(
    model: EffectiveSinrModel,
    vue: Vue,
    powers: np.ndarray,
    k: int,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """Vector of instantaneous inverse-SINR realizations for VUE k.

    MF interference keeps one Beta(1, M-1) term per interferer weighted by
    p_i/p_k (exact for unequal powers); the own-channel term is inverse-Gamma
    for both precoders.
    """
    served = len(powers)
    p_k = float(powers[k])
    if p_k <= 0.0:
        raise DomainError("power of the sampled VUE must be positive")
    m = model.antennas
    impair = (
        model.total_power * vue.pathloss * (1.0 - vue.accuracy)
        + m * model.noise_power
    )
    own_coef = impair / (p_k * vue.accuracy * vue.pathloss)
    if model.precoder is Precoder.MF:
        inv = np.zeros(size)
        for i in range(served):
            if i == k:
                continue
            beta = _sample_omega_block(OmegaKind.BETA_MF, m, served, rng, size)
            inv += (float(powers[i]) / p_k) * beta
        inv += own_coef * _sample_omega_block(
            OmegaKind.INV_GAMMA_MF, m, served, rng, size
        )
        return inv
    _check_kind(OmegaKind.INV_GAMMA_ZF, m, served)
    if m <= served:
        raise DomainError("ZF requires antennas > served VUEs")
    return own_coef * _sample_omega_block(
        OmegaKind.INV_GAMMA_ZF, m, served, rng, size
    )


def instantaneous_inv_sinr(
    model: EffectiveSinrModel,
    vue: Vue,
    powers: Sequence[float],
    k: int,
    rng: np.random.Generator,
) -> float:
    """One realization of the inverse SINR of VUE k."""
    p = np.asarray(powers, dtype=float)
    return float(_inv_sinr_block(model, vue, p, k, rng, 1)[0])


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    )


def _block_sizes(n: int) -> list[int]:
    full, rest = divmod(n, BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * full
    if rest:
        sizes.append(rest)
    return sizes


def empirical_rate(
    model: EffectiveSinrModel,
    vue: Vue,
    powers: Sequence[float],
    k: int,
    bandwidth: float,
    latency_s: float,
    mc: McConfig,
) -> EmpiricalRate:
    """Sample mean of the finite-blocklength rate over channel realizations.

    Reproducible for a given (seed, realizations) regardless of
    parallel_streams; block partial sums are combined with exact (fsum)
    accumulation in block order.
    """
    p = np.asarray(powers, dtype=float)
    sizes = _block_sizes(mc.realizations)

    def run_block(args: tuple[int, int]) -> tuple[float, float]:
        block, size = args
        rng = _block_rng(mc.seed, block)
        inv = _inv_sinr_block(model, vue, p, k, rng, size)
        rates = na_rate(1.0 / inv, latency_s, vue.reliability, bandwidth)
        rates = np.atleast_1d(np.asarray(rates, dtype=float))
        return math.fsum(rates), math.fsum(rates * rates)

    jobs = list(enumerate(sizes))
    if mc.parallel_streams > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=mc.parallel_streams) as pool:
            partials = list(pool.map(run_block, jobs))
    else:
        partials = [run_block(job) for job in jobs]

    n = mc.realizations
    total = math.fsum(part[0] for part in partials)
    total_sq = math.fsum(part[1] for part in partials)
    mean = total / n
    if n > 1:
        var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
        stderr = math.sqrt(var / n)
    else:
        stderr = float("inf")
    return EmpiricalRate(rate=mean, stderr=stderr, realizations=n)


#: Fixed column order of the tightness report (CSV wire schema).
TIGHTNESS_COLUMNS = (
    "M",
    "precoder",
    "csi",
    "vue",
    "theorem1_rate",
    "empirical_rate",
    "stderr",
    "rel_gap",
)


def tightness_report(
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
    latency_s: float,
    mc: McConfig,
    m_values: Sequence[int] = (50, 100, 200, 300, 400),
    precoders: Sequence[Precoder] = (Precoder.MF, Precoder.ZF),
    csi_modes: Sequence[str] = ("perfect", "imperfect"),
) -> list[dict]:
    """Deterministic-vs-empirical rate table under equal power.

    One row per (antenna count, precoder, CSI mode, VUE) with the columns in
    TIGHTNESS_COLUMNS; csi "perfect" evaluates every VUE at accuracy 1.
    """
    served = len(population)
    equal = model.total_power / served
    powers = np.full(served, equal)
    rows: list[dict] = []
    for m in m_values:
        for precoder in precoders:
            for csi in csi_modes:
                if csi not in ("perfect", "imperfect"):
                    raise DomainError(f"unknown CSI mode {csi!r}")
                sweep_model = replace(model, antennas=int(m), precoder=precoder)
                for k, base_vue in enumerate(population):
                    vue = (
                        replace(base_vue, accuracy=1.0)
                        if csi == "perfect"
                        else base_vue
                    )
                    det = effective_rate(
                        sweep_model, vue, equal, served, latency_s, bandwidth
                    )
                    emp = empirical_rate(
                        sweep_model, vue, powers, k, bandwidth, latency_s, mc
                    )
                    rows.append(
                        {
                            "M": int(m),
                            "precoder": precoder.value,
                            "csi": csi,
                            "vue": k,
                            "theorem1_rate": det,
                            "empirical_rate": emp.rate,
                            "stderr": emp.stderr,
                            "rel_gap": abs(emp.rate - det) / abs(det),
                        }
                    )
    return rows
