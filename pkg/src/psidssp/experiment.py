"""Benchmark harness: baselines, searches, gap statistics and reports.

Output layout of :func:`run_experiment`::

    out/results.csv        one row per (instance, strategy); deterministic
    out/report.json        aggregate report; wall-clock data only under "metadata"
    out/timings.csv        wall time per run (not reproducible by nature)
    out/history/*.csv      per-run search history (psi, z, elapsed_ms, event)
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .dssp import PsiEvaluator, run_dssp
from .fileio import load_instance, save_instance
from .model import FCNFInstance, NetworkCharacteristics, characteristics
from .search import STRATEGIES, SearchConfig, run_strategy, write_history_csv

log = logging.getLogger(__name__)

WORKERS_ENV = "PSIDSSP_WORKERS"
GRID = tuple(round(0.05 * k, 2) for k in range(1, 40))  # 0.05 .. 1.95

RESULT_COLUMNS = [
    "instance",
    "strategy",
    "z_dssp",
    "z_strategy",
    "z_gap",
    "s",
    "r",
    "best_psi",
    "iterations",
    "termination_reason",
    *NetworkCharacteristics.FIELDS,
]


def compute_gap(z_dssp: float, z_x: float) -> float:
    """Percent decrease of ``z_x`` relative to the plain-DSSP objective."""
    if z_dssp <= 0:
        raise ValueError("baseline objective must be positive")
    return (z_dssp - z_x) / z_dssp * 100.0


def solution_efficiency(z_gap: float, s: int) -> float:
    """Gap gained per DSSP evaluation."""
    if s < 1:
        raise ValueError("need at least one evaluation")
    return z_gap / s


def pearson_correlation(x, y) -> tuple[float, float]:
    """Pearson r and its two-sided p-value (t distribution, n-2 dof)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be one-dimensional and of equal length")
    n = len(x)
    if n < 3:
        raise ValueError("need at least three points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("series has zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, float(2.0 * stats.t.sf(abs(t), n - 2))


def psi_grid_sweep(instance: FCNFInstance, psis=GRID, evaluator=None) -> tuple[float, float, list[float]]:
    """Evaluate DSSP on a fixed psi grid; returns (best psi, best z, all z)."""
    evaluator = evaluator or PsiEvaluator(instance)
    values = [evaluator(p) for p in psis]
    k = int(np.argmin(values))
    return psis[k], values[k], values


# -- per-instance work -----------------------------------------------------------


@dataclass
class RunRecord:
    strategy: str
    z: float
    s: int
    best_psi: float
    iterations: int
    termination_reason: str
    wall_time: float
    history: list = field(default_factory=list)


def _run_instance(instance: FCNFInstance, strategies, config: SearchConfig):
    """Baseline plus every requested strategy on one instance (pickle-friendly)."""
    evaluator = PsiEvaluator(instance, config.dssp_max_iterations)
    t0 = time.perf_counter()
    base = run_dssp(instance, 1.0, config.dssp_max_iterations)
    base_time = time.perf_counter() - t0
    records = [RunRecord("dssp", base.best_objective, 1, 1.0, base.iterations, "converged" if base.converged else "budget_iterations", base_time)]
    for name in strategies:
        if name == "dssp":
            continue
        t0 = time.perf_counter()
        if name == "grid":
            psi, z, values = psi_grid_sweep(instance, GRID, evaluator)
            records.append(RunRecord("grid", z, len(values), psi, len(values), "complete", time.perf_counter() - t0))
            continue
        res = run_strategy(name, instance, config, evaluator)
        records.append(
            RunRecord(name, res.best_objective, res.evaluations, res.best_psi, res.iterations,
                      res.termination_reason, res.wall_time, res.history)
        )
    return records


def _safe_run(args):
    instance, strategies, config = args
    try:
        return _run_instance(instance, strategies, config), None
    except Exception as exc:  # reported, never silently dropped
        return None, f"{type(exc).__name__}: {exc}"


# -- report ------------------------------------------------------------------------


@dataclass
class GapReport:
    rows: list[dict]
    strategies: dict
    correlations: dict
    failures: list[dict]
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "strategies": self.strategies,
            "correlations": self.correlations,
            "failures": self.failures,
            "rows": len(self.rows),
            "metadata": self.metadata,
        }


def summarize(rows: list[dict], failures: list[dict] | None = None) -> GapReport:
    by_strategy: dict[str, list[dict]] = {}
    for row in rows:
        by_strategy.setdefault(row["strategy"], []).append(row)
    summary, corr = {}, {}
    for name, group in by_strategy.items():
        gaps = np.array([g["z_gap"] for g in group])
        summary[name] = {
            "instances": len(group),
            "mean_gap": float(gaps.mean()),
            "std_gap": float(gaps.std(ddof=1)) if len(gaps) > 1 else 0.0,
            "min_gap": float(gaps.min()),
            "max_gap": float(gaps.max()),
            "fraction_gap_positive": float(np.mean(gaps > 0)),
            "mean_s": float(np.mean([g["s"] for g in group])),
            "mean_r": float(np.mean([g["r"] for g in group])),
        }
        corr[name] = {}
        for fld in NetworkCharacteristics.FIELDS:
            try:
                r, p = pearson_correlation([g[fld] for g in group], gaps)
                corr[name][fld] = {"r": r, "p_value": p}
            except ValueError as exc:
                corr[name][fld] = {"r": None, "p_value": None, "reason": str(exc)}
    return GapReport(rows, summary, corr, failures or [])


def write_results_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (row[c] for c in RESULT_COLUMNS)])


def read_results_csv(path) -> list[dict]:
    ints = {"s", "iterations"}
    text = {"instance", "strategy", "termination_reason"}
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            rows.append({k: (v if k in text else int(v) if k in ints else float(v)) for k, v in raw.items()})
    return rows


def write_report(report: GapReport, out_dir) -> None:
    out = Path(out_dir)
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")


def reaggregate(out_dir) -> GapReport:
    """Rebuild report.json from an existing results.csv."""
    out = Path(out_dir)
    rows = read_results_csv(out / "results.csv")
    failures = []
    old = out / "report.json"
    if old.exists():
        failures = json.loads(old.read_text()).get("failures", [])
    report = summarize(rows, failures)
    report.metadata = {"reaggregated": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    write_report(report, out)
    return report


# -- driver --------------------------------------------------------------------------


def load_suite(source) -> list[FCNFInstance]:
    """Instances from a manifest file, a directory with manifest.json, or a list."""
    if isinstance(source, (list, tuple)):
        return list(source)
    path = Path(source)
    if path.is_dir():
        path = path / "manifest.json"
    manifest = json.loads(path.read_text())
    return [load_instance(path.parent / entry["file"]) for entry in manifest["instances"]]


def write_suite(instances, out_dir, **meta) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for inst in instances:
        fname = f"{inst.name}.json"
        save_instance(inst, out / fname)
        entries.append({"file": fname, "name": inst.name, "node_count": inst.node_count,
                        "arc_count": inst.arc_count, "characteristics": characteristics(inst).as_dict()})
    manifest = {"version": 1, **meta, "instances": entries}
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1) + "\n")
    return path


def resolve_strategies(selected) -> list[str]:
    if not selected or "all" in selected:
        return list(STRATEGIES)
    out = []
    for s in selected:
        if s not in (*STRATEGIES, "dssp", "grid"):
            raise ValueError(f"unknown strategy {s!r}")
        if s not in out:
            out.append(s)
    return out


def run_experiment(suite, strategies=None, config: SearchConfig | None = None, out_dir=None, workers: int | None = None) -> GapReport:
    """Plain DSSP baseline and each strategy on every instance of ``suite``.

    Instances run on a process pool of ``workers`` (default: the
    PSIDSSP_WORKERS environment variable, else 1); results are folded in
    suite order, so outputs do not depend on the worker count.
    """
    config = config or SearchConfig()
    instances = load_suite(suite)
    strategies = resolve_strategies(strategies)
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    started = _dt.datetime.now(_dt.timezone.utc)
    t0 = time.perf_counter()
    jobs = [(inst, strategies, config) for inst in instances]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_safe_run, jobs))
    else:
        outcomes = [_safe_run(job) for job in jobs]

    rows, failures, timings, histories = [], [], [], []
    for inst, (records, error) in zip(instances, outcomes):
        if error is not None:
            log.error("instance %s failed: %s", inst.name, error)
            failures.append({"instance": inst.name, "reason": error})
            continue
        ch = characteristics(inst).as_dict()
        z_dssp = records[0].z
        for rec in records:
            timings.append((inst.name, rec.strategy, rec.wall_time))
            if rec.strategy == "dssp":
                continue
            gap = compute_gap(z_dssp, rec.z)
            row = {
                "instance": inst.name,
                "strategy": rec.strategy,
                "z_dssp": z_dssp,
                "z_strategy": rec.z,
                "z_gap": gap,
                "s": rec.s,
                "r": solution_efficiency(gap, rec.s),
                "best_psi": rec.best_psi,
                "iterations": rec.iterations,
                "termination_reason": rec.termination_reason,
            }
            row.update({f: ch[f] for f in NetworkCharacteristics.FIELDS})
            rows.append(row)
            histories.append((inst.name, rec))

    report = summarize(rows, failures)
    report.metadata = {
        "started": started.isoformat(timespec="seconds"),
        "wall_seconds": time.perf_counter() - t0,
        "workers": workers,
        "config": config.as_dict(),
        "strategies": strategies,
    }
    if out_dir is not None:
        out = Path(out_dir)
        (out / "history").mkdir(parents=True, exist_ok=True)
        write_results_csv(rows, out / "results.csv")
        with open(out / "timings.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["instance", "strategy", "seconds"])
            w.writerows((name, s, f"{t:.6f}") for name, s, t in timings)
        for name, rec in histories:
            if rec.history:
                write_history_csv(rec, out / "history" / f"{name}__{rec.strategy}.csv")
        write_report(report, out)
    return report
