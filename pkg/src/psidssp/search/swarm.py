"""Particle swarm search over psi."""

from __future__ import annotations

import math

import numpy as np

from ..dssp import evaluator_for
from .config import BUDGET_TIME, EARLY_STOP, SearchConfig, SearchResult, SearchRun, TimeBudgetExceeded
from .operators import Particle, clamp, pso_inertia, pso_velocity_update


def run_pso(
    instance,
    config: SearchConfig | None = None,
    evaluator=None,
    *,
    init_positions=None,
    init_velocities=None,
) -> SearchResult:
    """Swarm with linearly decreasing inertia.

    Every particle draws from its own stream spawned from ``rng_seed``, so the
    draws of particle u do not depend on the swarm size. Positions start on
    U(0, 2) and velocities on U(-v_max, v_max) unless given explicitly;
    positions are clamped to ``psi_bounds`` before evaluation.
    """
    config = config or SearchConfig()
    evaluator = evaluator or evaluator_for(instance, config.dssp_max_iterations)
    run = SearchRun(evaluator, config, "pso")
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(config.rng_seed).spawn(config.particles)]

    swarm = []
    for u, rng in enumerate(streams):
        psi = rng.uniform(0.0, 2.0)
        v = rng.uniform(-config.v_max, config.v_max)
        if init_positions is not None:
            psi = init_positions[u]
        if init_velocities is not None:
            v = init_velocities[u]
        psi = clamp(float(psi), config.psi_bounds)
        swarm.append(Particle(position=psi, velocity=float(v), pbest_psi=psi))
    gbest_psi, gbest_z = math.nan, math.inf

    while True:
        reason = run.hard_stop()
        if reason:
            break
        run.begin_iteration()
        try:
            for u, p in enumerate(swarm):
                z = run.evaluate(p.position, f"particle{u}")
                if z <= p.pbest_objective:
                    p.pbest_objective, p.pbest_psi = z, p.position
                    if z <= gbest_z:
                        gbest_z, gbest_psi = z, p.position
        except TimeBudgetExceeded:
            reason = BUDGET_TIME
            break
        w_i = pso_inertia(config.w_max, config.w_min, run.iterations, config.i_max)
        for p, rng in zip(swarm, streams):
            p.velocity = pso_velocity_update(p, gbest_psi, w_i, config.c_1, config.c_2, config.v_max, rng)
            p.position = clamp(p.position + p.velocity, config.psi_bounds)
        if run.end_iteration():
            reason = EARLY_STOP
            break
    return run.result(reason)
