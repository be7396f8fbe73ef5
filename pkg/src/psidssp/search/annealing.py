"""Simulated annealing over psi (Boltzmann and very-fast-annealing variants)."""

from __future__ import annotations

import numpy as np

from ..dssp import evaluator_for
from .config import BUDGET_TIME, EARLY_STOP, SearchConfig, SearchResult, SearchRun, TimeBudgetExceeded
from .operators import (
    TINY_TEMPERATURE,
    boltzmann_neighbor,
    boltzmann_temperature,
    sa_accept,
    vfa_neighbor,
    vfa_temperature,
)

BOLTZMANN = "boltzmann"
VFA = "vfa"

_SCHEDULES = {
    BOLTZMANN: (boltzmann_temperature, boltzmann_neighbor, "sab"),
    VFA: (vfa_temperature, vfa_neighbor, "savf"),
}


def run_simulated_annealing(instance, config: SearchConfig | None = None, variant: str = BOLTZMANN, evaluator=None) -> SearchResult:
    """Anneal psi from ``config.psi_0``.

    Each outer iteration cools the temperature, then tries up to ``i_dwell``
    neighbors and leaves the dwell loop at the first accepted one. Candidates
    no worse than the current point are always accepted; worse ones pass
    with the relative-change Metropolis probability.
    """
    config = config or SearchConfig()
    try:
        schedule, neighbor, label = _SCHEDULES[variant]
    except KeyError:
        raise ValueError(f"unknown annealing variant {variant!r}") from None
    evaluator = evaluator or evaluator_for(instance, config.dssp_max_iterations)
    rng = np.random.default_rng(config.rng_seed)
    run = SearchRun(evaluator, config, label)

    psi_i = config.psi_0
    z_i = run.evaluate(psi_i, "start")
    while True:
        reason = run.hard_stop()
        if reason:
            break
        run.begin_iteration()
        T_i = max(schedule(config.T_0, run.iterations + 1), TINY_TEMPERATURE)
        try:
            for _ in range(config.i_dwell):
                psi_c = neighbor(psi_i, T_i, rng, bounds=config.psi_bounds)
                z_c = run.evaluate(psi_c, "candidate")
                if sa_accept(z_c, z_i, T_i, rng):
                    psi_i, z_i = psi_c, z_c
                    break
        except TimeBudgetExceeded:
            reason = BUDGET_TIME
            break
        if run.end_iteration():
            reason = EARLY_STOP
            break
    return run.result(reason)
