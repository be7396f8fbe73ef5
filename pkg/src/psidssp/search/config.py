"""Search configuration, results and the shared run bookkeeping."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class SearchConfig:
    """Tuning parameters and budgets shared by all psi searches.

    Defaults reproduce the published settings (SA: T0=0.25, dwell 3; TS:
    h0=0.01, hk=0.2, k=5, list length 5; PSO: 10 particles, vmax=1,
    w in [0.4, 0.9], c1=c2=2) with desk-scale budgets.
    """

    i_max: int = 200
    t_max: float = 60.0
    early_stop_window: int = 50
    psi_bounds: tuple[float, float] = (0.01, 2.0)
    psi_0: float = 1.0
    rng_seed: int = 0
    dssp_max_iterations: int = 200
    # simulated annealing
    T_0: float = 0.25
    i_dwell: int = 3
    # tabu search
    h_0: float = 0.01
    h_k: float = 0.2
    k: int = 5
    tabu_size: int = 5
    tabu_retries: int = 100
    # particle swarm
    particles: int = 10
    v_max: float = 1.0
    w_min: float = 0.4
    w_max: float = 0.9
    c_1: float = 2.0
    c_2: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "psi_bounds", tuple(float(b) for b in self.psi_bounds))
        lo, hi = self.psi_bounds
        checks = [
            (self.i_max >= 1, "i_max must be positive"),
            (self.t_max > 0, "t_max must be positive"),
            (self.early_stop_window >= 1, "early_stop_window must be positive"),
            (0 < lo < hi, "psi_bounds must satisfy 0 < low < high"),
            (lo <= self.psi_0 <= hi, "psi_0 must lie inside psi_bounds"),
            (self.dssp_max_iterations >= 1, "dssp_max_iterations must be positive"),
            (self.T_0 > 0, "T_0 must be positive"),
            (self.i_dwell >= 1, "i_dwell must be positive"),
            (0 < self.h_0 < self.h_k, "need 0 < h_0 < h_k"),
            (self.k >= 1, "k must be at least 1"),
            (self.tabu_size >= 1, "tabu_size must be at least 1"),
            (self.tabu_retries >= 1, "tabu_retries must be at least 1"),
            (self.particles >= 1, "particles must be at least 1"),
            (self.v_max > 0, "v_max must be positive"),
            (self.w_min <= self.w_max, "need w_min <= w_max"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)

    @classmethod
    def from_mapping(cls, data: dict) -> "SearchConfig":
        """Build from a flat mapping, or one with sa/ts/pso/budget sub-tables."""
        flat = {}
        for key, value in data.items():
            if isinstance(value, dict):
                flat.update(value)
            else:
                flat[key] = value
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(flat) - known)
        if unknown:
            raise ValueError(f"unknown search config keys: {unknown}")
        if "psi_bounds" in flat:
            flat["psi_bounds"] = tuple(flat["psi_bounds"])
        return cls(**flat)

    def replace(self, **changes) -> "SearchConfig":
        d = asdict(self)
        d.update(changes)
        return SearchConfig(**d)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["psi_bounds"] = list(self.psi_bounds)
        return d


def load_config(path) -> SearchConfig:
    path = Path(path)
    if path.suffix.lower() == ".toml":
        data = tomllib.loads(path.read_text())
    else:
        data = json.loads(path.read_text())
    return SearchConfig.from_mapping(data)


@dataclass(frozen=True)
class HistoryEntry:
    psi: float
    objective: float
    elapsed: float
    event: str


@dataclass
class SearchResult:
    strategy: str
    best_psi: float
    best_objective: float
    evaluations: int
    unique_evaluations: int
    iterations: int
    wall_time: float
    termination_reason: str
    history: list[HistoryEntry] = field(default_factory=list)


def write_history_csv(result: SearchResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["psi", "z", "elapsed_ms", "event"])
        for h in result.history:
            w.writerow([repr(h.psi), repr(h.objective), f"{h.elapsed * 1000:.3f}", h.event])


class TimeBudgetExceeded(Exception):
    pass


BUDGET_ITERATIONS = "budget_iterations"
BUDGET_TIME = "budget_time"
EARLY_STOP = "early_stop"


class SearchRun:
    """Counts evaluations, keeps the history and the anytime incumbent.

    The time budget is checked before every evaluation after the first, so a
    run overshoots ``t_max`` by at most one DSSP evaluation.
    """

    def __init__(self, evaluator, config: SearchConfig, strategy: str):
        self.evaluator = evaluator
        self.config = config
        self.strategy = strategy
        self.history: list[HistoryEntry] = []
        self.best_psi = float("nan")
        self.best_objective = float("inf")
        self.iterations = 0
        self._stale = 0
        self._improved = False
        self._started = time.perf_counter()
        self._seen: set[float] = set()

    def elapsed(self) -> float:
        return time.perf_counter() - self._started

    def evaluate(self, psi: float, event: str) -> float:
        if self.history and self.elapsed() >= self.config.t_max:
            raise TimeBudgetExceeded
        z = self.evaluator(psi)
        self._seen.add(round(psi, 6))
        self.history.append(HistoryEntry(float(psi), z, self.elapsed(), event))
        if z < self.best_objective:
            self.best_objective, self.best_psi = z, float(psi)
            self._improved = True
        return z

    def begin_iteration(self) -> None:
        self._improved = False

    def end_iteration(self) -> bool:
        """Close an outer iteration; True when the run should stop early."""
        self.iterations += 1
        self._stale = 0 if self._improved else self._stale + 1
        return self._stale >= self.config.early_stop_window

    def hard_stop(self) -> str | None:
        """Termination reason for a hard budget, or None."""
        if self.iterations >= self.config.i_max:
            return BUDGET_ITERATIONS
        if self.elapsed() >= self.config.t_max:
            return BUDGET_TIME
        return None

    def result(self, reason: str) -> SearchResult:
        return SearchResult(
            strategy=self.strategy,
            best_psi=self.best_psi,
            best_objective=self.best_objective,
            evaluations=len(self.history),
            unique_evaluations=len(self._seen),
            iterations=self.iterations,
            wall_time=self.elapsed(),
            termination_reason=reason,
            history=self.history,
        )
