import numpy as np
import pytest
from oracles import feasible_tiny_instances, subset_enumeration_optimum

from psidssp.dssp import run_dssp
from psidssp.exact import solve_exact
from psidssp.flow import InfeasibleFlowError, solve_min_cost_flow
from psidssp.generator import GeneratorParams, generate_instance
from psidssp.model import FCNFInstance, check_feasibility, true_objective


@pytest.mark.parametrize("method", ["bnb", "enumerate"])
def test_parallel_arcs(parallel_arcs, method):
    res = solve_exact(parallel_arcs, method)
    assert res.objective == 60.0
    assert res.open_arcs == [1]
    assert res.optimal


@pytest.mark.parametrize("method", ["bnb", "enumerate"])
def test_single_arc(single_arc, method):
    assert solve_exact(single_arc, method).objective == 2.0 * 10 + 100.0


@pytest.mark.parametrize("method", ["bnb", "enumerate"])
def test_against_subset_enumeration(method):
    for inst in feasible_tiny_instances(seed=31, count=30):
        res = solve_exact(inst, method)
        assert res.optimal
        assert res.objective == subset_enumeration_optimum(inst)
        assert check_feasibility(inst, res.flow) == []
        assert true_objective(inst, res.flow) == res.objective


def test_dominates_dssp_grid():
    grid = np.round(np.arange(0.05, 2.0, 0.05), 2)
    for inst in feasible_tiny_instances(seed=32, count=10):
        opt = solve_exact(inst).objective
        assert all(opt <= run_dssp(inst, p).best_objective for p in grid)


def test_methods_agree_on_small_generated():
    inst = generate_instance(GeneratorParams(node_count=4, seed=4))
    assert solve_exact(inst, "bnb").objective == pytest.approx(solve_exact(inst, "enumerate").objective, rel=1e-12)


def test_node_budget_flags_non_optimal():
    inst = generate_instance(GeneratorParams(node_count=6, seed=1))
    res = solve_exact(inst, "bnb", node_limit=2)
    assert not res.optimal
    assert res.objective < float("inf")
    assert check_feasibility(inst, res.flow) == []


def test_arc_limit():
    inst = generate_instance(GeneratorParams(node_count=12, seed=1))
    with pytest.raises(ValueError):
        solve_exact(inst, max_arcs=5)


def test_infeasible_instance():
    inst = FCNFInstance.from_arcs(3, [(0, 1, 1.0, 1.0, 5.0)], [2.0, 0.0, -2.0])
    with pytest.raises(InfeasibleFlowError):
        solve_exact(inst)


def test_opening_more_arcs_never_raises_variable_part():
    inst = feasible_tiny_instances(seed=33, count=1)[0]
    m = inst.arc_count
    rng = np.random.default_rng(0)
    for _ in range(20):
        small = rng.random(m) < 0.5
        large = small | (rng.random(m) < 0.5)
        try:
            z_small = float(inst.variable_cost[small] @ solve_min_cost_flow(inst.restricted(small), inst.variable_cost[small]).flow)
        except InfeasibleFlowError:
            continue
        z_large = float(inst.variable_cost[large] @ solve_min_cost_flow(inst.restricted(large), inst.variable_cost[large]).flow)
        assert z_large <= z_small
