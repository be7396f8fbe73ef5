"""Command-line interface: ``psidssp {generate,solve,exact,bench,report,describe}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .dssp import run_dssp, write_trajectory_csv
from .exact import solve_exact
from .experiment import (
    psi_grid_sweep,
    reaggregate,
    resolve_strategies,
    run_experiment,
    write_suite,
)
from .fileio import load_instance
from .flow import InfeasibleFlowError
from .generator import generate_suite
from .model import characteristics
from .search import SearchConfig, load_config, run_strategy, write_history_csv

STRATEGY_CHOICES = ["dssp", "sab", "savf", "ts", "pso", "grid", "all"]


def _config_from_args(args) -> SearchConfig:
    config = load_config(args.config) if args.config else SearchConfig()
    changes = {}
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    if args.tmax is not None:
        changes["t_max"] = args.tmax
    if args.imax is not None and args.imax != "auto":
        changes["i_max"] = int(args.imax)
    return config.replace(**changes) if changes else config


def _auto_imax(config: SearchConfig, instance) -> SearchConfig:
    """i_max = t_max / (time of one plain DSSP run)."""
    t0 = time.perf_counter()
    run_dssp(instance, 1.0, config.dssp_max_iterations)
    dt = max(time.perf_counter() - t0, 1e-6)
    return config.replace(i_max=max(1, int(config.t_max / dt)))


def _add_search_flags(p):
    p.add_argument("--seed", type=int, default=None, help="RNG seed for the search")
    p.add_argument("--tmax", type=float, default=None, help="wall-clock budget per run, seconds")
    p.add_argument("--imax", default=None, help="outer-iteration budget, or 'auto' (t_max / plain DSSP time)")
    p.add_argument("--config", default=None, help="search config file (.json or .toml)")


def cmd_generate(args) -> int:
    suite = generate_suite(args.levels, args.count, args.seed)
    path = write_suite(suite, args.out, seed=args.seed, node_levels=args.levels, count_per_level=args.count)
    print(f"wrote {len(suite)} instances and {path}")
    return 0


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    config = _config_from_args(args)
    if args.imax == "auto":
        config = _auto_imax(config, instance)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    strategy = args.strategy
    t0 = time.perf_counter()
    if strategy == "dssp":
        res = run_dssp(instance, args.psi, config.dssp_max_iterations)
        payload = {"strategy": "dssp", "psi": args.psi, "z": res.best_objective, "s": 1,
                   "iterations": res.iterations, "converged": res.converged}
        if out:
            write_trajectory_csv(res, out / "trajectory.csv")
    elif strategy == "grid":
        psi, z, values = psi_grid_sweep(instance)
        payload = {"strategy": "grid", "psi": psi, "z": z, "s": len(values)}
    else:
        res = run_strategy(strategy, instance, config)
        payload = {"strategy": strategy, "psi": res.best_psi, "z": res.best_objective, "s": res.evaluations,
                   "iterations": res.iterations, "termination": res.termination_reason}
        if out:
            write_history_csv(res, out / f"history_{strategy}.csv")
    payload["t"] = round(time.perf_counter() - t0, 6)
    print(json.dumps(payload))
    return 0


def cmd_exact(args) -> int:
    instance = load_instance(args.instance)
    res = solve_exact(instance, args.method, max_arcs=args.max_arcs, node_limit=args.node_limit, time_limit=args.tmax)
    print(json.dumps({"objective": res.objective, "optimal": res.optimal, "open_arcs": res.open_arcs,
                      "nodes": res.nodes, "method": res.method}))
    return 0 if res.optimal else 2


def cmd_bench(args) -> int:
    config = _config_from_args(args)
    strategies = resolve_strategies(args.strategy)
    report = run_experiment(args.suite, strategies, config, args.out, workers=args.workers)
    for name, summary in report.strategies.items():
        print(f"{name:5s} mean gap {summary['mean_gap']:6.2f}%  max {summary['max_gap']:6.2f}%  "
              f"gap>0 {100 * summary['fraction_gap_positive']:5.1f}%  mean s {summary['mean_s']:.1f}")
    if report.failures:
        print(f"{len(report.failures)} instance(s) failed; see report.json", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    report = reaggregate(args.results)
    print(json.dumps({"strategies": report.strategies, "correlations": report.correlations}, indent=2))
    return 0


def cmd_describe(args) -> int:
    print(json.dumps(characteristics(load_instance(args.instance)).as_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psidssp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="create a random instance suite")
    p.add_argument("--levels", type=int, nargs="+", default=[25, 50, 100], help="node counts")
    p.add_argument("--count", type=int, default=60, help="instances per node level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one strategy on one instance")
    p.add_argument("instance")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES[:-1], default="pso")
    p.add_argument("--psi", type=float, default=1.0, help="psi for --strategy dssp")
    p.add_argument("--out", default=None, help="directory for trajectory/history CSV")
    _add_search_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="exact optimum of a small instance")
    p.add_argument("instance")
    p.add_argument("--method", choices=["bnb", "enumerate"], default="bnb")
    p.add_argument("--max-arcs", type=int, default=20)
    p.add_argument("--node-limit", type=int, default=200_000)
    p.add_argument("--tmax", type=float, default=None)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bench", help="full experiment over a suite")
    p.add_argument("suite", help="suite directory or manifest.json")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, action="append", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None, help="process count (default: $PSIDSSP_WORKERS or 1)")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="re-aggregate report.json from results.csv")
    p.add_argument("results", help="bench output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("describe", help="print network characteristics of an instance")
    p.add_argument("instance")
    p.set_defaults(func=cmd_describe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, InfeasibleFlowError) as exc:
        print(f"psidssp {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
