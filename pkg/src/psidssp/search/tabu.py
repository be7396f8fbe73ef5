"""Continuous tabu search over psi with concentric distance bands."""

from __future__ import annotations

import logging
from collections import deque

import numpy as np

from ..dssp import evaluator_for
from .config import BUDGET_TIME, EARLY_STOP, SearchConfig, SearchResult, SearchRun, TimeBudgetExceeded
from .operators import reflect, tabu_bands

log = logging.getLogger(__name__)


def _is_tabu(psi: float, tabu, h_0: float) -> bool:
    return any(abs(psi - t) <= h_0 for t in tabu)


def sample_band_candidates(psi_i, bands, tabu, h_0, bounds, rng, retries=100) -> list[float]:
    """One candidate per band (uniform distance, uniform side), avoiding tabu points.

    Bands that yield no admissible point within ``retries`` draws are skipped.
    """
    out = []
    for lo, hi in zip(bands, bands[1:]):
        for _ in range(retries):
            dist = rng.uniform(lo, hi)
            side = 1.0 if rng.random() < 0.5 else -1.0
            cand = reflect(psi_i + side * dist, bounds)
            if not _is_tabu(cand, tabu, h_0):
                out.append(cand)
                break
    return out


def run_tabu_search(instance, config: SearchConfig | None = None, evaluator=None) -> SearchResult:
    """Move to the best band candidate each iteration, improving or not."""
    config = config or SearchConfig()
    evaluator = evaluator or evaluator_for(instance, config.dssp_max_iterations)
    rng = np.random.default_rng(config.rng_seed)
    run = SearchRun(evaluator, config, "ts")
    bands = tabu_bands(config.h_0, config.h_k, config.k)
    tabu: deque[float] = deque(maxlen=config.tabu_size)

    psi_i = config.psi_0
    run.evaluate(psi_i, "start")
    while True:
        reason = run.hard_stop()
        if reason:
            break
        run.begin_iteration()
        candidates = sample_band_candidates(psi_i, bands, tabu, config.h_0, config.psi_bounds, rng, config.tabu_retries)
        if not candidates:
            log.warning("tabu search: every band blocked around psi=%.6f; iteration skipped", psi_i)
        else:
            try:
                scored = [(run.evaluate(c, f"band{j + 1}"), j, c) for j, c in enumerate(candidates)]
            except TimeBudgetExceeded:
                reason = BUDGET_TIME
                break
            _, _, psi_i = min(scored)
            tabu.append(psi_i)
        if run.end_iteration():
            reason = EARLY_STOP
            break
    return run.result(reason)
