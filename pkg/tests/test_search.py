import csv
import math
import time
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psidssp.dssp import PsiEvaluator, run_dssp
from psidssp.exact import solve_exact
from psidssp.search import (
    STRATEGIES,
    Particle,
    SearchConfig,
    boltzmann_neighbor,
    boltzmann_temperature,
    load_config,
    pso_inertia,
    pso_velocity_update,
    run_pso,
    run_simulated_annealing,
    run_strategy,
    run_tabu_search,
    sa_accept_probability,
    tabu_bands,
    vfa_neighbor,
    vfa_temperature,
    write_history_csv,
)
from psidssp.search.tabu import sample_band_candidates

# -- operators ------------------------------------------------------------------------


def test_acceptance_probability():
    assert sa_accept_probability(100.0, 100.0, 0.25) == 1.0
    assert sa_accept_probability(90.0, 100.0, 0.25) == 1.0
    assert sa_accept_probability(110.0, 100.0, 0.25) == pytest.approx(0.6703, abs=5e-5)
    assert sa_accept_probability(200.0, 100.0, 0.25) == pytest.approx(0.0183, abs=5e-5)
    with pytest.raises(ValueError):
        sa_accept_probability(1.0, 0.0, 0.25)
    with pytest.raises(ValueError):
        sa_accept_probability(1.0, 1.0, 0.0)


def test_boltzmann_schedule():
    assert boltzmann_temperature(0.25, 1) == pytest.approx(0.36067, abs=5e-6)
    assert boltzmann_temperature(0.25, math.e - 1) == pytest.approx(0.25, rel=1e-15)
    assert boltzmann_temperature(0.25, 100) == pytest.approx(0.05417, abs=5e-6)
    with pytest.raises(ValueError):
        boltzmann_temperature(0.25, 0)


def test_vfa_schedule():
    assert vfa_temperature(0.25, 0) == 0.25
    assert vfa_temperature(0.25, 1) == 0.25 * math.exp(-1 / math.e)
    assert round(vfa_temperature(0.25, 1), 4) == 0.1731
    temps = [vfa_temperature(0.25, i) for i in range(1, 50)]
    assert all(b < a for a, b in zip(temps, temps[1:]))


def test_boltzmann_neighbor():
    for T in (0.25, 1.0):
        assert boltzmann_neighbor(1.0, T, v=0.0) == 1.0
    assert boltzmann_neighbor(1.0, 0.25, v=1.0) == pytest.approx(1.25)
    assert boltzmann_neighbor(1.0, 1.0, v=-0.9) == pytest.approx(0.7)
    assert boltzmann_neighbor(1.9, 1.0, v=3.0, bounds=(0.01, 2.0)) == 2.0


def test_vfa_neighbor():
    assert vfa_neighbor(1.0, 0.25, u=0.5) == 1.0
    assert vfa_neighbor(1.0, 0.25, u=1e-15) == pytest.approx(2.0, rel=1e-12)
    # u < 0.5 steps up, u >= 0.5 steps down; |2u - 1| = 0.5 for both u below
    assert vfa_neighbor(1.0, 0.25, u=0.25) == pytest.approx(1 + 0.25 * (5**0.5 - 1), rel=1e-12)
    assert vfa_neighbor(1.0, 0.25, u=0.75) == pytest.approx(1 - 0.25 * (5**0.5 - 1), rel=1e-12)
    assert vfa_neighbor(1.0, 0.25, u=0.75) == pytest.approx(0.6910, abs=5e-5)
    assert vfa_neighbor(0.05, 0.25, u=0.99, bounds=(0.01, 2.0)) == 0.01


def test_tabu_bands():
    h = tabu_bands(0.01, 0.2, 5)
    assert h[0] == 0.01
    assert h[1:] == pytest.approx([0.0125, 0.025, 0.05, 0.1, 0.2])
    assert tabu_bands(0.01, 0.2, 1) == [0.01, 0.2]
    with pytest.raises(ValueError):
        tabu_bands(0.02, 0.2, 5)


def test_inertia():
    assert pso_inertia(0.9, 0.4, 0, 200) == 0.9
    assert pso_inertia(0.9, 0.4, 200, 200) == pytest.approx(0.4)
    assert pso_inertia(0.9, 0.4, 100, 200) == pytest.approx(0.65)
    assert pso_inertia(0.5, 0.5, 37, 200) == 0.5
    with pytest.raises(ValueError):
        pso_inertia(0.9, 0.4, 201, 200)


def test_velocity_update():
    still = Particle(position=0.7, velocity=0.0, pbest_psi=0.7, pbest_objective=1.0)
    assert pso_velocity_update(still, 0.7, 0.9, 2, 2, 1.0, r=(0.3, 0.8)) == 0.0
    p = Particle(position=1.0, velocity=0.1, pbest_psi=1.2)
    assert pso_velocity_update(p, 0.9, 0.9, 2, 2, 1.0, r=(0.5, 0.5)) == pytest.approx(0.19)
    fast = Particle(position=0.0, velocity=1.7, pbest_psi=0.0)
    assert pso_velocity_update(fast, 0.0, 1.0, 2, 2, 1.0, r=(0.5, 0.5)) == 1.0


@given(
    pos=st.floats(0.01, 2.0),
    v=st.floats(-1, 1),
    pb=st.floats(0.01, 2.0),
    gb=st.floats(0.01, 2.0),
    seed=st.integers(0, 1000),
)
def test_velocity_always_clamped(pos, v, pb, gb, seed):
    p = Particle(position=pos, velocity=v, pbest_psi=pb)
    out = pso_velocity_update(p, gb, 0.9, 2, 2, 1.0, np.random.default_rng(seed))
    assert -1.0 <= out <= 1.0


def test_acceptance_frequency_small_sample():
    rng = np.random.default_rng(123)
    p = sa_accept_probability(110.0, 100.0, 0.25)
    n = 20_000
    freq = np.mean(rng.random(n) < p)
    assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / n)


# -- configuration ------------------------------------------------------------------


def test_config_defaults_and_validation(tmp_path):
    cfg = SearchConfig()
    assert (cfg.T_0, cfg.i_dwell, cfg.h_0, cfg.h_k, cfg.k, cfg.tabu_size) == (0.25, 3, 0.01, 0.2, 5, 5)
    assert (cfg.particles, cfg.v_max, cfg.w_min, cfg.w_max, cfg.c_1, cfg.c_2) == (10, 1.0, 0.4, 0.9, 2.0, 2.0)
    assert (cfg.i_max, cfg.t_max, cfg.psi_0, cfg.psi_bounds) == (200, 60.0, 1.0, (0.01, 2.0))
    for bad in ({"T_0": 0}, {"h_0": 0.3}, {"k": 0}, {"w_min": 1.0}, {"v_max": 0}, {"psi_0": 3.0}):
        with pytest.raises(ValueError):
            cfg.replace(**bad)

    toml = tmp_path / "c.toml"
    toml.write_text("i_max = 30\n[pso]\nparticles = 4\n[annealing]\nT_0 = 0.5\n")
    loaded = load_config(toml)
    assert (loaded.i_max, loaded.particles, loaded.T_0) == (30, 4, 0.5)
    js = tmp_path / "c.json"
    js.write_text('{"rng_seed": 9, "psi_bounds": [0.1, 1.5]}')
    assert load_config(js).psi_bounds == (0.1, 1.5)
    with pytest.raises((ValueError, TypeError)):
        SearchConfig.from_mapping({"no_such_field": 1})


# -- strategy behaviour -------------------------------------------------------------


def _flat(psi):
    return 42.0


def _config(**kw):
    base = dict(i_max=60, early_stop_window=10, rng_seed=5, t_max=30.0)
    base.update(kw)
    return SearchConfig(**base)


@pytest.mark.parametrize("name", STRATEGIES)
def test_flat_landscape_stops_early(name, flat_instance):
    cfg = _config()
    res = run_strategy(name, flat_instance, cfg)
    assert res.best_objective == run_dssp(flat_instance, cfg.psi_0).best_objective
    assert res.best_objective == res.history[0].objective
    assert res.termination_reason == "early_stop"


@pytest.mark.parametrize("name", STRATEGIES)
def test_determinism(name, three_arc):
    cfg = _config(i_max=25)
    a = run_strategy(name, three_arc, cfg)
    b = run_strategy(name, three_arc, cfg)
    key = lambda r: [(h.psi, h.objective, h.event) for h in r.history]  # noqa: E731
    assert key(a) == key(b)
    assert (a.best_psi, a.best_objective, a.evaluations, a.termination_reason) == (
        b.best_psi, b.best_objective, b.evaluations, b.termination_reason,
    )


@pytest.mark.parametrize("name", STRATEGIES)
def test_invariants_on_generated(name):
    from psidssp.generator import GeneratorParams, generate_instance

    inst = generate_instance(GeneratorParams(node_count=12, seed=21))
    cfg = _config(i_max=15)
    res = run_strategy(name, inst, cfg)
    zs = [h.objective for h in res.history]
    assert res.best_objective == min(zs)
    assert res.best_psi == res.history[zs.index(min(zs))].psi
    assert res.evaluations == len(res.history)
    assert all(cfg.psi_bounds[0] <= h.psi <= cfg.psi_bounds[1] for h in res.history)
    assert all(b.elapsed >= a.elapsed for a, b in zip(res.history, res.history[1:]))
    budget = {"sab": 1 + cfg.i_max * cfg.i_dwell, "savf": 1 + cfg.i_max * cfg.i_dwell,
              "ts": 1 + cfg.i_max * cfg.k, "pso": cfg.i_max * cfg.particles}[name]
    assert res.evaluations <= budget
    assert res.iterations <= cfg.i_max
    if name == "pso":
        first_gen = [h.objective for h in res.history[: cfg.particles]]
        assert res.best_objective <= min(first_gen)
    else:
        assert res.history[0].psi == cfg.psi_0
        assert res.best_objective <= run_dssp(inst, cfg.psi_0).best_objective


@pytest.mark.parametrize("name", STRATEGIES)
def test_time_budget(name, three_arc):
    step = 0.01

    def slow(psi):
        time.sleep(step)
        return 50.0 + abs(psi - 0.5)

    cfg = _config(t_max=0.15, i_max=10_000, early_stop_window=10_000)
    res = run_strategy(name, three_arc, cfg, evaluator=slow)
    assert res.termination_reason == "budget_time"
    assert res.wall_time <= cfg.t_max + step + 0.05


@pytest.mark.parametrize("variant", ["boltzmann", "vfa"])
def test_annealing_reaches_optimum(variant, three_arc):
    opt = solve_exact(three_arc).objective
    assert run_dssp(three_arc, 1.0).best_objective > opt
    res = run_simulated_annealing(three_arc, SearchConfig(rng_seed=0), variant)
    assert res.best_objective == opt


def test_annealing_rejects_unknown_variant(three_arc):
    with pytest.raises(ValueError):
        run_simulated_annealing(three_arc, variant="quench")


def _replay_tabu(history, cfg):
    """Rebuild the tabu list from a history and return every violation of the h_0 rule."""
    tabu = deque(maxlen=cfg.tabu_size)
    bad, batch = [], []
    for h in history[1:]:
        j = int(h.event[4:]) - 1
        if batch and j <= batch[-1][1]:  # band index restarts: previous iteration is complete
            tabu.append(min(batch)[2])
            batch = []
        if any(abs(h.psi - t) <= cfg.h_0 for t in tabu):
            bad.append(h.psi)
        batch.append((h.objective, j, h.psi))
    if batch:
        tabu.append(min(batch)[2])
    return bad, tabu


def test_tabu_exclusion_by_replay():
    from psidssp.generator import GeneratorParams, generate_instance

    inst = generate_instance(GeneratorParams(node_count=15, seed=2))
    cfg = _config(i_max=40, early_stop_window=40)
    res = run_tabu_search(inst, cfg)
    bad, _ = _replay_tabu(res.history, cfg)
    assert bad == []


def test_tabu_flat_landscape_list(flat_instance):
    cfg = _config(early_stop_window=3)
    res = run_tabu_search(flat_instance, cfg)
    assert res.best_objective == res.history[0].objective
    moves = res.iterations
    _, tabu = _replay_tabu(res.history, cfg)
    assert len(tabu) == min(cfg.tabu_size, moves)


def test_band_sampler_respects_tabu():
    rng = np.random.default_rng(0)
    bands = tabu_bands(0.01, 0.2, 5)
    tabu = [1.0125, 0.9875, 1.03, 0.97]
    for _ in range(200):
        cands = sample_band_candidates(1.0, bands, tabu, 0.01, (0.01, 2.0), rng)
        assert all(min(abs(c - t) for t in tabu) > 0.01 for c in cands)


def test_band_sampler_skips_blocked_bands():
    rng = np.random.default_rng(0)
    bands = tabu_bands(0.01, 0.2, 2)  # [0.01, 0.1, 0.2]
    tabu = list(np.arange(0.85, 1.16, 0.01))
    cands = sample_band_candidates(1.0, bands, tabu, 0.01, (0.01, 2.0), rng, retries=20)
    assert all(abs(c - 1.0) >= 0.1 for c in cands)


def test_tabu_far_band_reaches_distance_015():
    bands = tabu_bands(0.01, 0.2, 5)
    assert bands[4] <= 0.15 <= bands[5]
    hits = 0
    for seed in range(20):
        cfg = _config(i_max=1, rng_seed=seed)
        res = run_tabu_search(None, cfg, evaluator=lambda p: 1.0 + abs(p - 1.15))
        band5 = [h.psi for h in res.history if h.event == "band5"]
        assert all(0.1 <= abs(p - 1.0) <= 0.2 for p in band5)
        hits += any(abs(p - 1.15) <= 0.05 for p in band5)
        if res.history[1:] and min(h.objective for h in res.history[1:]) <= 1.05:
            assert abs(res.best_psi - 1.15) <= 0.05
    assert hits > 0


def test_pso_single_particle_stationary(three_arc):
    cfg = _config(particles=1, early_stop_window=4)
    res = run_pso(three_arc, cfg, init_positions=[1.0], init_velocities=[0.0])
    assert {h.psi for h in res.history} == {1.0}
    assert res.termination_reason == "early_stop"
    assert res.iterations == cfg.early_stop_window + 1


def test_pso_matches_fine_grid(three_arc):
    grid = np.round(np.arange(0.01, 2.0 + 1e-9, 0.01), 2)
    ev = PsiEvaluator(three_arc)
    z_grid = min(ev(p) for p in grid)
    res = run_pso(three_arc, SearchConfig(rng_seed=3))
    assert res.best_objective == z_grid


def test_pso_positions_in_bounds():
    cfg = _config(psi_bounds=(0.5, 1.5), i_max=20, early_stop_window=20, v_max=1.0)
    res = run_pso(None, cfg, evaluator=lambda p: (p - 0.2) ** 2 + 1)
    assert all(0.5 <= h.psi <= 1.5 for h in res.history)
    assert res.best_psi == 0.5


def test_history_csv(tmp_path, three_arc):
    res = run_strategy("sab", three_arc, _config(i_max=5))
    path = tmp_path / "h.csv"
    write_history_csv(res, path)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["psi", "z", "elapsed_ms", "event"]
    assert [float(r["z"]) for r in rows] == [h.objective for h in res.history]


def test_unknown_strategy(three_arc):
    with pytest.raises(ValueError):
        run_strategy("ga", three_arc)
