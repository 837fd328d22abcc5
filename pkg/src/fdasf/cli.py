"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 too many failed runs.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dasf import check_constraint_bounds
from .harness import (
    ConfigError,
    ExperimentConfig,
    ExperimentError,
    prepare_run,
    run_experiment,
    write_outputs,
)

_CONSTRAINT_COUNTS = {
    "tro": lambda q: q * (q + 1) // 2,
    "rtls": lambda q: 1,
    "qol": lambda q: 0,
}


def _load_config(path: str, overrides: argparse.Namespace) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = ExperimentConfig.from_dict(doc)
    for name in ("problem", "mode", "seed", "iterations", "runs"):
        value = getattr(overrides, name, None)
        if value is not None:
            setattr(config, name, value)
    if getattr(overrides, "stats", None) is not None:
        config.stats_mode = overrides.stats
    config.validate()
    return config


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args)
    output = run_experiment(config, keep_details=False)
    write_outputs(output, args.out)
    report = output.report
    print(f"wrote {args.out}/curves.csv, medse.csv, report.json")
    for mode, summary in sorted(report.modes.items()):
        if summary.medse:
            print(f"  {mode}: final MedSE {summary.medse[-1]:.3e}")
    if report.aux_ratio is not None:
        print(f"  auxiliary-solve ratio (dasf/fdasf): {report.aux_ratio:.2f}")
    if report.failed_runs:
        print(f"  excluded failed runs: {report.failed_runs}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args)
    setup = prepare_run(config, 0)
    count = _CONSTRAINT_COUNTS[config.problem](config.q)
    report = check_constraint_bounds(count, config.q, setup.topology)
    print(
        f"problem {config.problem}: {count} constraints, "
        f"simple bound {report.simple_bound} "
        f"({'ok' if report.simple_ok else 'exceeded'}), "
        f"topology bound {report.topology_bound:.3g} "
        f"({'ok' if report.topology_ok else 'exceeded'})"
    )
    if not report.satisfied:
        print("warning: neither stationarity bound holds", file=sys.stderr)
    print("config valid")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fdasf",
        description="Distributed fractional spatial-filtering experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a Monte Carlo experiment")
    run_p.add_argument("--config", required=True, help="JSON config path")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--problem", choices=("tro", "rtls", "qol"))
    run_p.add_argument("--mode", choices=("fdasf", "dasf", "both"))
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--iterations", type=int)
    run_p.add_argument("--runs", type=int)
    run_p.add_argument("--stats", choices=("empirical", "exact"))
    run_p.set_defaults(func=_cmd_run)

    val_p = sub.add_parser("validate", help="validate a config and its bounds")
    val_p.add_argument("--config", required=True, help="JSON config path")
    val_p.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ExperimentError as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
