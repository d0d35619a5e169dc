"""Experiment sweeps and CSV persistence.

Every sweep is a pure function of (config, seed): rows come out in a fixed
deterministic order and floats are written with 17 significant digits, so
re-running a sweep reproduces the output byte for byte. Infeasible sweep
points are kept as rows with a status marker instead of aborting the run.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import (
    EffectiveSinrModel,
    Precoder,
    Vue,
    effective_sinr,
    make_population,
    worst_case_pathloss,
)
from .config import SystemConfig
from .errors import ConvergenceError, DomainError, InfeasibleRateError
from .fbl import na_rate
from .montecarlo import TIGHTNESS_COLUMNS, McConfig, tightness_report
from .road_traffic import num_vues
from .stage1 import Stage1Inputs, Stage1Result, optimal_bandwidth
from .stage2 import AllocationResult, dinkelbach_allocate, epa_allocate

STATUS_OK = "ok"
STATUS_INFEASIBLE = "infeasible"
STATUS_ERROR = "error"

SCHEMA_STAGE1_DENSITY = (
    "density",
    "delta",
    "precoder",
    "csi",
    "gamma_w",
    "bandwidth_hz",
    "total_power_w",
    "coherence_time_s",
    "worst_latency_s",
    "status",
)
SCHEMA_STAGE1_RELIABILITY = (
    "reliability",
    "density",
    "delta",
    "precoder",
    "csi",
    "gamma_w",
    "bandwidth_hz",
    "total_power_w",
    "status",
)
SCHEMA_DENSITY_LATENCY = (
    "density",
    "precoder",
    "csi",
    "scheme",
    "max_latency_s",
    "eta_star",
    "bandwidth_hz",
    "total_power_w",
    "outer_iterations",
    "inner_iterations",
    "status",
)
SCHEMA_ALLOCATE = (
    "density",
    "precoder",
    "csi",
    "scheme",
    "vue",
    "position_m",
    "pathloss",
    "power_w",
    "latency_s",
    "eta_star",
    "max_latency_s",
    "bandwidth_hz",
    "total_power_w",
    "status",
)
SCHEMA_POWER_LATENCY = (
    "power_multiplier",
    "total_power_w",
    "precoder",
    "csi",
    "scheme",
    "max_latency_s",
    "bandwidth_hz",
    "status",
)
SCHEMA_TRADEOFF = (
    "latency_s",
    "reliability",
    "precoder",
    "csi",
    "rate_bps",
    "ergodic_rate_bps",
    "status",
)
SCHEMA_MC = TIGHTNESS_COLUMNS
SCHEMA_TRACE_OUTER = ("j", "eta_j", "F_j")
SCHEMA_TRACE_INNER = ("i", "max_h", "min_h", "mu_i")


def _format_value(value: object) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def emit_csv(rows: Iterable[dict], schema: Sequence[str], path: str | Path) -> None:
    """Write rows under a fixed schema: header first, '.' decimals, LF line
    endings, floats at 17 significant digits (lossless round trip)."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(schema)
        for row in rows:
            extra = set(row) - set(schema)
            if extra:
                raise DomainError(f"row keys {sorted(extra)} not in schema")
            writer.writerow([_format_value(row.get(col, "")) for col in schema])


def read_csv(path: str | Path) -> list[dict]:
    """Rows as string dicts (inverse of emit_csv up to number formatting)."""
    with Path(path).open(newline="") as handle:
        return list(csv.DictReader(handle))


def _precoder_list(choice: str) -> list[Precoder]:
    if choice == "both":
        return [Precoder.MF, Precoder.ZF]
    return [Precoder(choice)]


def _csi_list(choice: str) -> list[str]:
    if choice == "both":
        return ["perfect", "imperfect"]
    if choice not in ("perfect", "imperfect"):
        raise DomainError(f"unknown CSI mode {choice!r}")
    return [choice]


def _chi(cfg: SystemConfig, csi: str) -> float:
    return 1.0 if csi == "perfect" else cfg.accuracy


def stage1_for(
    cfg: SystemConfig, density: float, precoder: Precoder, csi: str
) -> Stage1Result:
    inputs = Stage1Inputs(
        density=density,
        delta=cfg.delta,
        worst_reliability=cfg.reliability,
        worst_rate=cfg.target_rate,
        chi_th=_chi(cfg, csi),
        precoder=precoder,
        antennas=cfg.antennas,
    )
    return optimal_bandwidth(inputs, cfg.channel_config(), cfg.traffic_model())


def build_scenario(
    cfg: SystemConfig, density: float, precoder: Precoder, csi: str, seed: int
) -> tuple[Stage1Result, list[Vue], EffectiveSinrModel]:
    """Stage-1 outcome plus a seeded population and SINR model for Stage 2."""
    result = stage1_for(cfg, density, precoder, csi)
    count = num_vues(cfg.traffic_model(), density)
    population = make_population(
        cfg.channel_config(),
        count,
        seed=seed,
        mode="uniform-random",
        accuracy=_chi(cfg, csi),
        target_rate=cfg.target_rate,
        reliability=cfg.reliability,
    )
    model = EffectiveSinrModel(
        precoder=precoder,
        antennas=cfg.antennas,
        total_power=result.total_power,
        noise_power=cfg.noise_psd * result.bandwidth,
    )
    return result, population, model


def _allocate_pair(
    cfg: SystemConfig,
    population: Sequence[Vue],
    model: EffectiveSinrModel,
    bandwidth: float,
) -> tuple[AllocationResult, AllocationResult]:
    count = len(population)
    proposed = dinkelbach_allocate(
        population,
        model,
        bandwidth,
        zeta_p=cfg.zeta_p,
        eta0=cfg.eta0,
        mu0=model.total_power / (2.0 * count),
        zeta_s=cfg.zeta_s,
        max_outer=cfg.outer_cap,
        max_inner=cfg.inner_cap,
    )
    baseline = epa_allocate(population, model, bandwidth)
    return proposed, baseline


def run_twin_timescale(
    cfg: SystemConfig,
    densities: Sequence[float],
    seed: int,
    precoder_choice: str = "both",
    csi_choice: str = "both",
) -> list[dict]:
    """Twin-timescale pipeline over a list of reported densities.

    Each density report re-enters Stage 1 (bandwidth and budget recomputed),
    regenerates the population from the master seed, then runs the proposed
    allocation and the equal-power baseline. Failed points become rows with a
    status marker and the sweep continues.
    """
    rows: list[dict] = []
    for density in densities:
        for precoder in _precoder_list(precoder_choice):
            for csi in _csi_list(csi_choice):
                base = {
                    "density": density,
                    "precoder": precoder.value,
                    "csi": csi,
                }
                try:
                    result, population, model = build_scenario(
                        cfg, density, precoder, csi, seed
                    )
                    proposed, baseline = _allocate_pair(
                        cfg, population, model, result.bandwidth
                    )
                except (InfeasibleRateError, DomainError) as exc:
                    rows.append(
                        base
                        | {
                            "scheme": "proposed",
                            "status": f"{STATUS_INFEASIBLE}: {exc}",
                        }
                    )
                    continue
                except ConvergenceError as exc:
                    rows.append(
                        base
                        | {"scheme": "proposed", "status": f"{STATUS_ERROR}: {exc}"}
                    )
                    continue
                for scheme, alloc in (("proposed", proposed), ("epa", baseline)):
                    rows.append(
                        base
                        | {
                            "scheme": scheme,
                            "max_latency_s": alloc.max_latency,
                            "eta_star": alloc.eta_star,
                            "bandwidth_hz": result.bandwidth,
                            "total_power_w": result.total_power,
                            "outer_iterations": alloc.outer_iterations,
                            "inner_iterations": alloc.total_inner_iterations,
                            "status": STATUS_OK,
                        }
                    )
    return rows


def sweep_stage1_density(
    cfg: SystemConfig,
    densities: Sequence[float],
    precoder_choice: str = "both",
    csi_choice: str = "both",
) -> list[dict]:
    """Bandwidth selection across densities (one row per combination)."""
    rows: list[dict] = []
    for density in densities:
        for precoder in _precoder_list(precoder_choice):
            for csi in _csi_list(csi_choice):
                base = {
                    "density": density,
                    "delta": cfg.delta,
                    "precoder": precoder.value,
                    "csi": csi,
                }
                try:
                    result = stage1_for(cfg, density, precoder, csi)
                except (DomainError, InfeasibleRateError) as exc:
                    rows.append(base | {"status": f"{STATUS_INFEASIBLE}: {exc}"})
                    continue
                rows.append(
                    base
                    | {
                        "gamma_w": result.gamma_w,
                        "bandwidth_hz": result.bandwidth,
                        "total_power_w": result.total_power,
                        "coherence_time_s": result.coherence_time,
                        "worst_latency_s": result.worst_latency,
                        "status": STATUS_OK,
                    }
                )
    return rows


def sweep_stage1_reliability(
    cfg: SystemConfig,
    reliabilities: Sequence[float],
    densities: Sequence[float] = (0.05, 0.1),
    precoder_choice: str = "both",
    csi_choice: str = "both",
) -> list[dict]:
    """Bandwidth selection across worst-case reliability targets."""
    rows: list[dict] = []
    for eps in reliabilities:
        for density in densities:
            for precoder in _precoder_list(precoder_choice):
                for csi in _csi_list(csi_choice):
                    base = {
                        "reliability": eps,
                        "density": density,
                        "delta": cfg.delta,
                        "precoder": precoder.value,
                        "csi": csi,
                    }
                    try:
                        inputs = Stage1Inputs(
                            density=density,
                            delta=cfg.delta,
                            worst_reliability=eps,
                            worst_rate=cfg.target_rate,
                            chi_th=_chi(cfg, csi),
                            precoder=precoder,
                            antennas=cfg.antennas,
                        )
                        result = optimal_bandwidth(
                            inputs, cfg.channel_config(), cfg.traffic_model()
                        )
                    except (DomainError, InfeasibleRateError) as exc:
                        rows.append(
                            base | {"status": f"{STATUS_INFEASIBLE}: {exc}"}
                        )
                        continue
                    rows.append(
                        base
                        | {
                            "gamma_w": result.gamma_w,
                            "bandwidth_hz": result.bandwidth,
                            "total_power_w": result.total_power,
                            "status": STATUS_OK,
                        }
                    )
    return rows


def run_allocate(
    cfg: SystemConfig,
    seed: int,
    precoder_choice: str = "both",
    csi_choice: str = "both",
) -> list[dict]:
    """Single-density allocation detail: one row per VUE and scheme."""
    rows: list[dict] = []
    for precoder in _precoder_list(precoder_choice):
        for csi in _csi_list(csi_choice):
            result, population, model = build_scenario(
                cfg, cfg.density, precoder, csi, seed
            )
            proposed, baseline = _allocate_pair(
                cfg, population, model, result.bandwidth
            )
            for scheme, alloc in (("proposed", proposed), ("epa", baseline)):
                for k, vue in enumerate(population):
                    rows.append(
                        {
                            "density": cfg.density,
                            "precoder": precoder.value,
                            "csi": csi,
                            "scheme": scheme,
                            "vue": k,
                            "position_m": vue.position,
                            "pathloss": vue.pathloss,
                            "power_w": float(alloc.powers[k]),
                            "latency_s": float(alloc.latencies[k]),
                            "eta_star": alloc.eta_star,
                            "max_latency_s": alloc.max_latency,
                            "bandwidth_hz": result.bandwidth,
                            "total_power_w": result.total_power,
                            "status": STATUS_OK,
                        }
                    )
    return rows


def sweep_power_latency(
    cfg: SystemConfig,
    multipliers: Sequence[float],
    seed: int,
    precoder_choice: str = "both",
    csi_choice: str = "both",
) -> list[dict]:
    """Latency versus total power P_B = multiplier * P_0 * B^*."""
    rows: list[dict] = []
    for precoder in _precoder_list(precoder_choice):
        for csi in _csi_list(csi_choice):
            result, population, model = build_scenario(
                cfg, cfg.density, precoder, csi, seed
            )
            for mult in multipliers:
                if mult <= 0.0:
                    raise DomainError("power multipliers must be positive")
                scaled = EffectiveSinrModel(
                    precoder=model.precoder,
                    antennas=model.antennas,
                    total_power=mult * result.total_power,
                    noise_power=model.noise_power,
                )
                base = {
                    "power_multiplier": mult,
                    "total_power_w": scaled.total_power,
                    "precoder": precoder.value,
                    "csi": csi,
                    "bandwidth_hz": result.bandwidth,
                }
                try:
                    proposed, baseline = _allocate_pair(
                        cfg, population, scaled, result.bandwidth
                    )
                except (InfeasibleRateError, DomainError) as exc:
                    rows.append(
                        base
                        | {
                            "scheme": "proposed",
                            "status": f"{STATUS_INFEASIBLE}: {exc}",
                        }
                    )
                    continue
                for scheme, alloc in (("proposed", proposed), ("epa", baseline)):
                    rows.append(
                        base
                        | {
                            "scheme": scheme,
                            "max_latency_s": alloc.max_latency,
                            "status": STATUS_OK,
                        }
                    )
    return rows


def tradeoff_surface(
    cfg: SystemConfig,
    latencies: Sequence[float],
    reliabilities: Sequence[float],
    precoder_choice: str = "mf",
    csi_choice: str = "imperfect",
) -> list[dict]:
    """Rate over a (latency, reliability) grid at the fixed-bandwidth
    operating point, for the worst-placed (road-edge) VUE under equal power.

    The ergodic column carries the latency/reliability-free ceiling
    B log2(1+Gamma) for comparison.
    """
    chan = cfg.channel_config()
    count = num_vues(cfg.traffic_model(), cfg.density)
    rows: list[dict] = []
    for precoder in _precoder_list(precoder_choice):
        for csi in _csi_list(csi_choice):
            model = EffectiveSinrModel(
                precoder=precoder,
                antennas=cfg.antennas,
                total_power=cfg.total_power,
                noise_power=cfg.noise_psd * cfg.bandwidth,
            )
            edge = Vue(
                position=0.0,
                pathloss=worst_case_pathloss(chan),
                accuracy=_chi(cfg, csi),
                target_rate=cfg.target_rate,
                reliability=cfg.reliability,
            )
            gamma_edge = effective_sinr(model, edge, cfg.total_power / count, count)
            ergodic = cfg.bandwidth * math.log2(1.0 + gamma_edge)
            for lat in latencies:
                for eps in reliabilities:
                    rows.append(
                        {
                            "latency_s": lat,
                            "reliability": eps,
                            "precoder": precoder.value,
                            "csi": csi,
                            "rate_bps": na_rate(gamma, lat, eps, cfg.bandwidth),
                            "ergodic_rate_bps": ergodic,
                            "status": STATUS_OK,
                        }
                    )
    return rows


def mc_validate(
    cfg: SystemConfig,
    seed: int,
    m_values: Sequence[int],
    precoder_choice: str = "both",
    csi_choice: str = "both",
) -> list[dict]:
    """Deterministic-vs-empirical rate table at the fixed-bandwidth point."""
    chan = cfg.channel_config()
    count = num_vues(cfg.traffic_model(), cfg.density)
    population = make_population(
        chan,
        count,
        seed=seed,
        mode="uniform-random",
        accuracy=cfg.accuracy,
        target_rate=cfg.target_rate,
        reliability=cfg.reliability,
    )
    model = EffectiveSinrModel(
        precoder=Precoder.ZF,
        antennas=cfg.antennas,
        total_power=cfg.total_power,
        noise_power=cfg.noise_psd * cfg.bandwidth,
    )
    mc = McConfig(
        realizations=cfg.mc_realizations,
        seed=seed,
        parallel_streams=cfg.mc_parallel_streams,
    )
    precoders = [Precoder(p.value) for p in _precoder_list(precoder_choice)]
    return tightness_report(
        population,
        model,
        cfg.bandwidth,
        cfg.mc_latency,
        mc,
        m_values=m_values,
        precoders=precoders,
        csi_modes=tuple(_csi_list(csi_choice)),
    )


def convergence_trace(
    cfg: SystemConfig,
    seed: int,
    precoder_choice: str = "zf",
    csi_choice: str = "imperfect",
) -> tuple[list[dict], list[dict]]:
    """Outer (eta_j, F_j) and first-subproblem inner (max/min h, mu) traces."""
    precoder = _precoder_list(precoder_choice)[0]
    csi = _csi_list(csi_choice)[0]
    result, population, model = build_scenario(
        cfg, cfg.density, precoder, csi, seed
    )
    alloc = dinkelbach_allocate(
        population,
        model,
        result.bandwidth,
        zeta_p=cfg.zeta_p,
        eta0=cfg.eta0,
        mu0=result.total_power / (2.0 * len(population)),
        zeta_s=cfg.zeta_s,
        max_outer=cfg.outer_cap,
        max_inner=cfg.inner_cap,
        record_inner_traces=True,
    )
    outer = [
        {"j": j, "eta_j": eta, "F_j": f_j}
        for j, (eta, f_j) in enumerate(alloc.trace)
    ]
    inner_rows: list[dict] = []
    if alloc.inner_traces:
        first = alloc.inner_traces[0]
        inner_rows = [
            {
                "i": int(row[0]),
                "max_h": float(row[1]),
                "min_h": float(row[2]),
                "mu_i": float(row[3]),
            }
            for row in first
        ]
    return outer, inner_rows


def check_density_latency_claims(rows: Sequence[dict]) -> list[str]:
    """Post-run checks on a density sweep: the proposed scheme never exceeds
    the equal-power baseline, and ZF never exceeds MF. Returns violations."""
    table: dict[tuple, float] = {}
    for row in rows:
        if row.get("status") != STATUS_OK:
            continue
        key = (row["density"], row["precoder"], row["csi"], row["scheme"])
        table[key] = float(row["max_latency_s"])
    violations: list[str] = []
    for (density, precoder, csi, scheme), value in sorted(
        table.items(), key=lambda kv: tuple(map(str, kv[0]))
    ):
        if scheme != "proposed":
            continue
        epa = table.get((density, precoder, csi, "epa"))
        if epa is not None and value > epa:
            violations.append(
                f"proposed {value:.6g}s exceeds EPA {epa:.6g}s at "
                f"density={density}, precoder={precoder}, csi={csi}"
            )
    for (density, precoder, csi, scheme), value in sorted(
        table.items(), key=lambda kv: tuple(map(str, kv[0]))
    ):
        if precoder != "zf":
            continue
        mf = table.get((density, "mf", csi, scheme))
        if mf is not None and value >= mf:
            violations.append(
                f"ZF {value:.6g}s not below MF {mf:.6g}s at density={density}, "
                f"csi={csi}, scheme={scheme}"
            )
    return violations
