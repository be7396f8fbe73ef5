"""Exact FCNF solutions for small instances.

Two methods, both driven by the linear min-cost-flow solver:

``bnb``
    Depth-first branch and bound on the open/closed status of each arc. The
    bound at a node is the LP relaxation with free arcs priced at
    ``c + f / M`` plus the fixed cost of arcs forced open.
``enumerate``
    Arc subsets by increasing cardinality; a subset whose fixed costs alone
    reach the incumbent is skipped, and the scan stops once the cheapest
    subsets of the next size already do.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .flow import InfeasibleFlowError, solve_min_cost_flow
from .model import FCNFInstance, FlowSolution, true_objective

FREE, OPEN, CLOSED = 0, 1, -1


@dataclass
class ExactResult:
    objective: float
    flow: FlowSolution | None
    optimal: bool
    nodes: int
    method: str

    @property
    def open_arcs(self) -> list[int]:
        return [] if self.flow is None else np.flatnonzero(self.flow.open).tolist()


def _restricted_solve(instance: FCNFInstance, keep: np.ndarray, cost: np.ndarray):
    """Min-cost flow using only arcs in ``keep``; flow mapped back to all arcs, or None."""
    sub = instance.restricted(keep)
    try:
        sol = solve_min_cost_flow(sub, cost[keep])
    except InfeasibleFlowError:
        return None
    flow = np.zeros(instance.arc_count)
    flow[keep] = sol.flow
    return flow


def _bnb(instance: FCNFInstance, node_limit: int, deadline: float | None) -> ExactResult:
    c, f, M = instance.variable_cost, instance.fixed_cost, instance.capacity
    best_z, best_flow = float("inf"), None
    stack = [np.zeros(instance.arc_count, dtype=np.int8)]
    nodes = 0
    while stack:
        if nodes >= node_limit or (deadline is not None and time.perf_counter() > deadline):
            return ExactResult(best_z, best_flow, False, nodes, "bnb")
        status = stack.pop()
        nodes += 1
        keep = status != CLOSED
        cost = np.where(status == OPEN, c, c + f / M)
        flow = _restricted_solve(instance, keep, cost)
        if flow is None:
            continue
        bound = float(cost @ flow + f[status == OPEN].sum())
        if bound >= best_z - 1e-9 * max(1.0, abs(best_z)):
            continue
        sol = FlowSolution(flow)
        z = true_objective(instance, sol)
        if z < best_z:
            best_z, best_flow = z, sol
        gap = np.where((status == FREE) & sol.open, f * (1.0 - flow / M), 0.0)
        if gap.max(initial=0.0) <= 0.0:
            continue
        arc = int(np.argmax(gap))
        closed, opened = status.copy(), status.copy()
        closed[arc], opened[arc] = CLOSED, OPEN
        stack.append(closed)
        stack.append(opened)  # explored first
    return ExactResult(best_z, best_flow, True, nodes, "bnb")


def _enumerate(instance: FCNFInstance, subset_limit: int, deadline: float | None) -> ExactResult:
    m = instance.arc_count
    c, f = instance.variable_cost, instance.fixed_cost
    cheapest = np.concatenate([[0.0], np.cumsum(np.sort(f))])
    best_z, best_flow = float("inf"), None
    count = 0
    for size in range(m + 1):
        if cheapest[size] >= best_z:
            break
        for subset in itertools.combinations(range(m), size):
            if count >= subset_limit or (deadline is not None and time.perf_counter() > deadline):
                return ExactResult(best_z, best_flow, False, count, "enumerate")
            count += 1
            idx = list(subset)
            if f[idx].sum() >= best_z:
                continue
            keep = np.zeros(m, dtype=bool)
            keep[idx] = True
            flow = _restricted_solve(instance, keep, c)
            if flow is None:
                continue
            sol = FlowSolution(flow)
            z = true_objective(instance, sol)
            if z < best_z:
                best_z, best_flow = z, sol
    return ExactResult(best_z, best_flow, True, count, "enumerate")


def solve_exact(
    instance: FCNFInstance,
    method: str = "bnb",
    *,
    max_arcs: int = 20,
    node_limit: int = 200_000,
    time_limit: float | None = None,
) -> ExactResult:
    """Optimal FCNF objective and flow.

    ``optimal`` is False when the node/subset budget or time limit stopped the
    search; the best flow found so far is returned. Raises ``ValueError`` for
    instances above ``max_arcs`` arcs and ``InfeasibleFlowError`` when no
    feasible flow exists.
    """
    if instance.arc_count > max_arcs:
        raise ValueError(f"instance has {instance.arc_count} arcs; exact search is limited to {max_arcs}")
    # fails fast with a certificate when the full network cannot route the requirements
    solve_min_cost_flow(instance, instance.variable_cost)
    deadline = None if time_limit is None else time.perf_counter() + time_limit
    if method == "bnb":
        return _bnb(instance, node_limit, deadline)
    if method == "enumerate":
        return _enumerate(instance, node_limit, deadline)
    raise ValueError(f"unknown method {method!r}")
