"""Command-line entry point.

    maoeacs run <config> [--out DIR] [--seed S] [--reps K] [--metric igd|hv|both] [--jobs J] [--trace]
    maoeacs sweep <config> [same options]
    maoeacs metrics <front-file> <ref-file> [--hv-samples N] [--seed S]

Exit codes: 0 on success, 1 on a configuration or input error, 2 on a
runtime failure (including any failed replication).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from maoeacs.core import InvalidInputError, nondominated_indices, rng_stream
from maoeacs.harness.config import METRICS, ConfigError, parse_config
from maoeacs.harness.experiment import run_experiment
from maoeacs.harness.export import export
from maoeacs.metrics import MC_DEFAULT_SAMPLES, hypervolume, igd
from maoeacs.problems import read_point_file

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

logger = logging.getLogger("maoeacs")


def _experiment_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", type=Path, help="experiment configuration file")
    p.add_argument("--out", type=Path, help="output directory (overrides [experiment] out)")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--reps", type=int, help="replications per cell")
    p.add_argument("--metric", choices=METRICS, help="metrics to compute")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--trace", action="store_true", default=None, help="export per-generation traces")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maoeacs", description="Corner-search many-objective optimizer")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="replicated runs of each configured problem")
    _experiment_options(run_p)
    sweep_p = sub.add_parser("sweep", help="threshold x len sensitivity grid")
    _experiment_options(sweep_p)

    metrics_p = sub.add_parser("metrics", help="IGD and HV of a point file against a reference file")
    metrics_p.add_argument("front", type=Path)
    metrics_p.add_argument("reference", type=Path)
    metrics_p.add_argument("--hv-samples", type=int, default=MC_DEFAULT_SAMPLES, help="Monte Carlo samples for m > 3")
    metrics_p.add_argument("--seed", type=int, default=0, help="seed of the Monte Carlo stream")
    return parser


def _cmd_experiment(args: argparse.Namespace, sweep: bool) -> int:
    config = parse_config(args.config).with_overrides(
        out=args.out,
        seed=args.seed,
        replications=args.reps,
        metric=args.metric,
        jobs=args.jobs,
        trace=args.trace,
    )
    result = run_experiment(config, sweep=sweep)
    paths = export(result, config.out)
    for s in result.summaries:
        parts = [f"cell {s.cell:>3} {s.problem} threshold={s.threshold:g} len={s.len}"]
        if s.igd_mean is not None:
            parts.append(f"IGD {s.igd_mean:.6g} +/- {s.igd_std:.3g}")
        if s.hv_mean is not None:
            parts.append(f"HV {s.hv_mean:.6g} +/- {s.hv_std:.3g}")
        if s.n_failed:
            parts.append(f"{s.n_failed} failed")
        print("  ".join(parts))
    print(f"wrote {paths['runs']}, {paths['cells']}, {paths['summary']}")
    if result.n_failed:
        print(f"error: {result.n_failed} replication(s) failed; see {paths['summary']}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    S = read_point_file(args.front)
    R = read_point_file(args.reference)
    if S.shape[1] != R.shape[1]:
        raise InvalidInputError(f"front has m={S.shape[1]} but reference has m={R.shape[1]}")
    front = S[nondominated_indices(S)]
    print(f"IGD {igd(S, R)!r}")
    print(f"HV {hypervolume(front, R, args.hv_samples, rng_stream(args.seed))!r}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "metrics":
            return _cmd_metrics(args)
        return _cmd_experiment(args, sweep=args.command == "sweep")
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
