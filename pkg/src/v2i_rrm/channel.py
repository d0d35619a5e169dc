"""Geometry-driven large-scale fading, imperfect-CSI parameters and the
deterministic effective SINR of the MF / ZF massive-MIMO downlink.

Shadow fading is deliberately absent from the model (roadside deployment with
line of sight); small-scale realizations live in the montecarlo module.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DomainError


class Precoder(str, enum.Enum):
    """Linear transmit precoder at the base station."""

    MF = "mf"
    ZF = "zf"


@dataclass(frozen=True)
class ChannelConfig:
    """Static geometry and power-spectral-density parameters (SI units)."""

    bs_offset: float  # m, BS distance from the road
    road_length: float  # m
    gain_constant: float  # dimensionless pathloss scale
    pathloss_exponent: float  # dimensionless, > 2
    noise_psd: float  # W/Hz
    signal_psd: float  # W/Hz

    def __post_init__(self) -> None:
        if self.bs_offset <= 0.0:
            raise DomainError("bs_offset must be positive")
        if self.road_length <= 0.0:
            raise DomainError("road_length must be positive")
        if self.gain_constant <= 0.0:
            raise DomainError("gain_constant must be positive")
        if self.pathloss_exponent <= 2.0:
            raise DomainError("pathloss_exponent must exceed 2")
        if self.noise_psd <= 0.0:
            raise DomainError("noise_psd must be positive")
        if self.signal_psd <= 0.0:
            raise DomainError("signal_psd must be positive")


@dataclass(frozen=True)
class Vue:
    """One vehicular user: position, large-scale gain and QoS requirements."""

    position: float  # m along the road
    pathloss: float  # dimensionless gain beta_k
    accuracy: float  # channel estimation accuracy chi_k in (0, 1]
    target_rate: float  # bits/s
    reliability: float  # error probability, in (0, 0.5)

    def __post_init__(self) -> None:
        if self.position < 0.0:
            raise DomainError("position must be nonnegative")
        if self.pathloss <= 0.0:
            raise DomainError("pathloss gain must be positive")
        if not (0.0 < self.accuracy <= 1.0):
            raise DomainError("accuracy must lie in (0, 1]")
        if self.target_rate <= 0.0:
            raise DomainError("target_rate must be positive")
        if not (0.0 < self.reliability < 0.5):
            raise DomainError("reliability must lie in (0, 0.5)")


@dataclass(frozen=True)
class EffectiveSinrModel:
    """Evaluation context for the deterministic effective SINR."""

    precoder: Precoder
    antennas: int  # M
    total_power: float  # W
    noise_power: float  # W (sigma^2 = N_0 * B at the chosen bandwidth)

    def __post_init__(self) -> None:
        if self.antennas < 2:
            raise DomainError("antennas must be at least 2")
        if self.total_power <= 0.0:
            raise DomainError("total_power must be positive")
        if self.noise_power <= 0.0:
            raise DomainError("noise_power must be positive")


def pathloss(cfg: ChannelConfig, position: float) -> float:
    """Large-scale gain at a road position, maximal at the road midpoint."""
    if not (0.0 <= position <= cfg.road_length):
        raise DomainError(
            f"position {position!r} outside road [0, {cfg.road_length}]"
        )
    dx = position - 0.5 * cfg.road_length
    return cfg.gain_constant * (dx * dx + cfg.bs_offset**2) ** (
        -0.5 * cfg.pathloss_exponent
    )


def worst_case_pathloss(cfg: ChannelConfig) -> float:
    """Gain at the largest BS distance (either end of the road)."""
    half = 0.5 * cfg.road_length
    return cfg.gain_constant * (cfg.bs_offset**2 + half * half) ** (
        -0.5 * cfg.pathloss_exponent
    )


def place_vues(
    cfg: ChannelConfig, count: int, seed: int = 0, mode: str = "uniform-random"
) -> list[float]:
    """Positions for `count` VUEs on [0, d_R].

    "uniform-random" reproduces the i.i.d. uniform drop (deterministic per
    seed); "equispaced" puts VUE k at (k - 1/2) * d_R / count for regression
    tests.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    if mode == "uniform-random":
        rng = np.random.default_rng(seed)
        return [float(x) for x in rng.uniform(0.0, cfg.road_length, count)]
    if mode == "equispaced":
        step = cfg.road_length / count
        return [(k + 0.5) * step for k in range(count)]
    raise DomainError(f"unknown placement mode {mode!r}")


def make_vue(
    cfg: ChannelConfig,
    position: float,
    accuracy: float,
    target_rate: float,
    reliability: float,
) -> Vue:
    """Vue at a road position with its gain derived from the geometry."""
    return Vue(
        position=position,
        pathloss=pathloss(cfg, position),
        accuracy=accuracy,
        target_rate=target_rate,
        reliability=reliability,
    )


def make_population(
    cfg: ChannelConfig,
    count: int,
    seed: int = 0,
    mode: str = "uniform-random",
    accuracy: float = 0.8,
    target_rate: float = 1e5,
    reliability: float = 1e-6,
) -> list[Vue]:
    """Population of VUEs with shared QoS requirements."""
    return [
        make_vue(cfg, pos, accuracy, target_rate, reliability)
        for pos in place_vues(cfg, count, seed, mode)
    ]


def with_accuracy(population: Sequence[Vue], accuracy: float) -> list[Vue]:
    """Copy of a population with every estimation accuracy replaced."""
    return [replace(v, accuracy=accuracy) for v in population]


def _check_zf(model: EffectiveSinrModel, served: int) -> None:
    if model.precoder is Precoder.ZF and model.antennas <= served:
        raise DomainError(
            f"ZF requires antennas > served VUEs, got M={model.antennas}, K={served}"
        )


def phi(model: EffectiveSinrModel, vue: Vue, served: int) -> float:
    """Deterministic interference/noise coefficient of the effective SINR.

    MF:  [P_B beta (1-chi) + M sigma^2] / (chi beta) * M / (M-1)
    ZF:  chi beta (M-K) / [P_B beta (1-chi) + M sigma^2]
    """
    _check_zf(model, served)
    m = float(model.antennas)
    impair = (
        model.total_power * vue.pathloss * (1.0 - vue.accuracy)
        + m * model.noise_power
    )
    if model.precoder is Precoder.MF:
        return impair / (vue.accuracy * vue.pathloss) * (m / (m - 1.0))
    return vue.accuracy * vue.pathloss * (m - served) / impair


def effective_sinr(
    model: EffectiveSinrModel, vue: Vue, power: float, served: int
) -> float:
    """Effective SINR at transmit power `power` for one VUE.

    MF: M p / (P_B - p + phi);  ZF: p * phi.  Nonnegative and strictly
    increasing in the power, the antenna count and the estimation accuracy.
    """
    if not (0.0 <= power <= model.total_power):
        raise DomainError(
            f"power must lie in [0, total_power], got {power!r}"
        )
    coef = phi(model, vue, served)
    if model.precoder is Precoder.MF:
        return model.antennas * power / (model.total_power - power + coef)
    return power * coef


def asymptotic_sinr(model: EffectiveSinrModel, vue: Vue, power: float) -> float:
    """Infinite-antenna limit of the effective SINR, p chi beta / sigma^2."""
    if power < 0.0:
        raise DomainError("power must be nonnegative")
    return power * vue.accuracy * vue.pathloss / model.noise_power
