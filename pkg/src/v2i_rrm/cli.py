"""Command-line entry point.

One subcommand per experiment kind, all sharing --config/--out/--seed,
--precoder and --csi. Exit codes: 0 success, 1 configuration error,
2 solver infeasibility in a non-sweep command.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import experiments
from .config import SystemConfig, load_config
from .errors import ConfigError, InfeasibleRateError

CONFIG_DIR_ENV = "V2I_RRM_CONFIG_DIR"
DEFAULT_CONFIG_NAME = "default.cfg"

_DENSITIES = "0.025,0.05,0.075,0.1,0.125,0.15"
_RELIABILITIES = "1e-9,1e-8,1e-7,1e-6,1e-5"
_MULTIPLIERS = "1.0,1.25,1.5,1.75,2.0"
_M_VALUES = "50,100,200,300,400"
_LATENCIES = "0.0002,0.0005,0.001,0.002,0.005,0.01"
_TRADEOFF_EPS = "1e-9,1e-8,1e-7,1e-6,1e-5,1e-4,1e-3,1e-2"


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _resolve_config(path: str | None) -> SystemConfig:
    if path is not None:
        return load_config(path)
    config_dir = os.environ.get(CONFIG_DIR_ENV)
    if config_dir:
        candidate = Path(config_dir) / DEFAULT_CONFIG_NAME
        if candidate.exists():
            return load_config(candidate)
    return SystemConfig()


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--config",
        help=f"config file (default: ${CONFIG_DIR_ENV}/{DEFAULT_CONFIG_NAME} "
        "if set, else built-in defaults)",
    )
    shared.add_argument("--out", required=True, help="output CSV path")
    shared.add_argument("--seed", type=int, default=12345)
    shared.add_argument(
        "--precoder", choices=("mf", "zf", "both"), default="both"
    )
    shared.add_argument(
        "--csi", choices=("perfect", "imperfect", "both"), default="both"
    )

    parser = argparse.ArgumentParser(
        prog="v2i-rrm",
        description=(
            "Twin-timescale bandwidth and max-min power allocation sweeps "
            "for a URLLC vehicle-to-infrastructure downlink"
        ),
    )
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser(
        "stage1-sweep-density",
        parents=[shared],
        help="optimal bandwidth versus road-traffic density",
    )
    p.add_argument("--densities", type=_float_list, default=_DENSITIES)

    p = sub.add_parser(
        "stage1-sweep-reliability",
        parents=[shared],
        help="optimal bandwidth versus worst-case reliability",
    )
    p.add_argument("--reliabilities", type=_float_list, default=_RELIABILITIES)
    p.add_argument("--densities", type=_float_list, default="0.05,0.1")

    sub.add_parser(
        "allocate",
        parents=[shared],
        help="single-density allocation detail (per-VUE powers and latencies)",
    )

    p = sub.add_parser(
        "sweep-density-latency",
        parents=[shared],
        help="max latency versus density for the proposed scheme and EPA",
    )
    p.add_argument("--densities", type=_float_list, default=_DENSITIES)

    p = sub.add_parser(
        "sweep-power-latency",
        parents=[shared],
        help="max latency versus total power (multiples of P_0 * B*)",
    )
    p.add_argument("--multipliers", type=_float_list, default=_MULTIPLIERS)

    p = sub.add_parser(
        "tradeoff-surface",
        parents=[shared],
        help="rate over a (latency, reliability) grid at fixed bandwidth",
    )
    p.add_argument("--latencies", type=_float_list, default=_LATENCIES)
    p.add_argument("--reliabilities", type=_float_list, default=_TRADEOFF_EPS)

    p = sub.add_parser(
        "mc-validate",
        parents=[shared],
        help="Monte Carlo tightness of the deterministic rate",
    )
    p.add_argument("--m-values", type=_int_list, default=_M_VALUES)
    p.add_argument("--realizations", type=int, default=None)

    sub.add_parser(
        "convergence-trace",
        parents=[shared],
        help="solver traces: outer (eta, F) CSV plus *_inner.csv",
    )
    return parser


def _normalize(value, parse):
    return parse(value) if isinstance(value, str) else value


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    kind = args.kind
    try:
        if kind == "stage1-sweep-density":
            rows = experiments.sweep_stage1_density(
                cfg,
                _normalize(args.densities, _float_list),
                args.precoder,
                args.csi,
            )
            experiments.emit_csv(rows, experiments.SCHEMA_STAGE1_DENSITY, out)
        elif kind == "stage1-sweep-reliability":
            rows = experiments.sweep_stage1_reliability(
                cfg,
                _normalize(args.reliabilities, _float_list),
                _normalize(args.densities, _float_list),
                args.precoder,
                args.csi,
            )
            experiments.emit_csv(rows, experiments.SCHEMA_STAGE1_RELIABILITY, out)
        elif kind == "allocate":
            rows = experiments.run_allocate(cfg, args.seed, args.precoder, args.csi)
            experiments.emit_csv(rows, experiments.SCHEMA_ALLOCATE, out)
        elif kind == "sweep-density-latency":
            rows = experiments.run_twin_timescale(
                cfg,
                _normalize(args.densities, _float_list),
                args.seed,
                args.precoder,
                args.csi,
            )
            experiments.emit_csv(rows, experiments.SCHEMA_DENSITY_LATENCY, out)
            for violation in experiments.check_density_latency_claims(rows):
                print(f"claim violation: {violation}", file=sys.stderr)
        elif kind == "sweep-power-latency":
            rows = experiments.sweep_power_latency(
                cfg,
                _normalize(args.multipliers, _float_list),
                args.seed,
                args.precoder,
                args.csi,
            )
            experiments.emit_csv(rows, experiments.SCHEMA_POWER_LATENCY, out)
        elif kind == "tradeoff-surface":
            rows = experiments.tradeoff_surface(
                cfg,
                _normalize(args.latencies, _float_list),
                _normalize(args.reliabilities, _float_list),
                args.precoder,
                args.csi,
            )
            experiments.emit_csv(rows, experiments.SCHEMA_TRADEOFF, out)
        elif kind == "mc-validate":
            if args.realizations is not None:
                from dataclasses import replace

                cfg = replace(cfg, mc_realizations=args.realizations)
            rows = experiments.mc_validate(
                cfg,
                args.seed,
                _normalize(args.m_values, _int_list),
                args.precoder,
                args.csi,
            )
            experiments.emit_csv(rows, experiments.SCHEMA_MC, out)
        elif kind == "convergence-trace":
            outer, inner = experiments.convergence_trace(
                cfg,
                args.seed,
                "zf" if args.precoder == "both" else args.precoder,
                "imperfect" if args.csi == "both" else args.csi,
            )
            experiments.emit_csv(outer, experiments.SCHEMA_TRACE_OUTER, out)
            inner_path = out.with_name(out.stem + "_inner" + out.suffix)
            experiments.emit_csv(inner, experiments.SCHEMA_TRACE_INNER, inner_path)
        else:  # pragma: no cover - argparse guards this
            raise AssertionError(kind)
    except InfeasibleRateError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
