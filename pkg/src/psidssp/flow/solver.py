"""Linear min-cost flow for FCNF instances.

Cold solves use successive shortest paths with node potentials (all DSSP
costs are non-negative). Warm starts cancel negative residual cycles from a
previous feasible flow. ``verify_optimality`` checks complementary slackness
with Bellman-Ford potentials, independently of the shortest-path kernels.
"""

from __future__ import annotations

import json
import weakref
from dataclasses import dataclass

import numpy as np

from ..model import FCNFInstance, FlowSolution, check_feasibility
from . import _backend


class InfeasibleFlowError(RuntimeError):
    """The requirements cannot be routed.

    ``deficit_nodes`` are demand nodes the super source cannot reach in the
    final residual network; their unmet demand is ``shortfall``.
    """

    def __init__(self, message: str, deficit_nodes: list[int], shortfall: float):
        super().__init__(message)
        self.deficit_nodes = deficit_nodes
        self.shortfall = shortfall


@dataclass(frozen=True)
class LinearArcCosts:
    cost: np.ndarray

    def __post_init__(self):
        arr = np.array(self.cost, dtype=np.float64, copy=True)
        if not np.isfinite(arr).all():
            raise ValueError("arc costs must be finite")
        if (arr < 0).any():
            raise ValueError("arc costs must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "cost", arr)


def _as_cost_array(instance: FCNFInstance, costs) -> np.ndarray:
    if isinstance(costs, LinearArcCosts):
        arr = costs.cost
    else:
        arr = np.asarray(costs, dtype=np.float64)
        if not np.isfinite(arr).all() or (arr < 0).any():
            raise ValueError("arc costs must be finite and non-negative")
    if arr.shape != (instance.arc_count,):
        raise ValueError(f"expected {instance.arc_count} arc costs, got shape {arr.shape}")
    return arr


class FlowNetwork:
    """Residual-graph layout for one instance, reused across solves.

    Nodes ``0..n-1`` are the instance nodes, ``n`` the super source and
    ``n+1`` the super sink. Arcs ``0..m-1`` are the instance arcs, followed
    by source->supply arcs and demand->sink arcs (zero cost).
    """

    def __init__(self, instance: FCNFInstance):
        n, m = instance.node_count, instance.arc_count
        r = instance.requirement
        supply = np.flatnonzero(r > 0)
        demand = np.flatnonzero(r < 0)
        self.instance_arcs = m
        self.n = n + 2
        self.source, self.sink = n, n + 1
        self.supply_nodes, self.demand_nodes = supply, demand
        tail = np.concatenate([instance.tail, np.full(len(supply), n), demand]).astype(np.int64)
        head = np.concatenate([instance.head, supply, np.full(len(demand), n + 1)]).astype(np.int64)
        self.cap = np.concatenate([instance.capacity, r[supply], -r[demand]]).astype(np.float64)
        self.required = float(r[supply].sum())
        E = len(tail)
        self.arc_total = E
        # residual edge 2a: tail->head, 2a+1: head->tail
        to = np.empty(2 * E, dtype=np.int64)
        to[0::2], to[1::2] = head, tail
        frm = np.empty(2 * E, dtype=np.int64)
        frm[0::2], frm[1::2] = tail, head
        order = np.argsort(frm, kind="stable")
        self.to = to
        self.adj_edge = order.astype(np.int64)
        self.adj_start = np.searchsorted(frm[order], np.arange(self.n + 1)).astype(np.int64)
        self._lists = None

    def _python_layout(self):
        if self._lists is None:
            self._lists = (self.to.tolist(), self.adj_start.tolist(), self.adj_edge.tolist(), self.cap.tolist())
        return self._lists

    def solve(self, arc_cost: np.ndarray, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(flow on instance arcs, potentials on instance nodes)``."""
        full_cost = np.zeros(self.arc_total)
        full_cost[: self.instance_arcs] = arc_cost
        k = _backend.kernel(backend)
        if k.__name__.endswith("_ssp_py"):
            to, start, edges, cap = self._python_layout()
            flow = [0.0] * self.arc_total
            pot = [0.0] * self.n
            reached = [False] * self.n
            status, sent = k.ssp_solve(
                self.n, self.source, self.sink, to, start, edges, cap, full_cost.tolist(),
                self.required, flow, pot, reached,
            )
            flow = np.array(flow)
            pot = np.array(pot)
            reached = np.array(reached, dtype=bool)
        else:
            flow = np.zeros(self.arc_total)
            pot = np.zeros(self.n)
            reached_u8 = np.zeros(self.n, dtype=np.uint8)
            status, sent = k.ssp_solve(
                self.n, self.source, self.sink, self.to, self.adj_start, self.adj_edge, self.cap,
                full_cost, self.required, flow, pot, reached_u8,
            )
            reached = reached_u8.astype(bool)
        if status != k.OPTIMAL:
            deficit = [int(d) for d in self.demand_nodes if not reached[d]]
            shortfall = self.required - sent
            raise InfeasibleFlowError(
                f"{shortfall:g} units of demand cannot be routed; unreachable demand nodes: {deficit}",
                deficit,
                shortfall,
            )
        n0 = self.n - 2
        return flow[: self.instance_arcs], pot[:n0]


_networks: "weakref.WeakKeyDictionary[FCNFInstance, FlowNetwork]" = weakref.WeakKeyDictionary()


def flow_network(instance: FCNFInstance) -> FlowNetwork:
    net = _networks.get(instance)
    if net is None:
        net = _networks[instance] = FlowNetwork(instance)
    return net


def solve_min_cost_flow(instance: FCNFInstance, costs, *, backend: str | None = None) -> FlowSolution:
    """Optimal flow for linear arc costs ``costs`` (``LinearArcCosts`` or array)."""
    flow, _ = flow_network(instance).solve(_as_cost_array(instance, costs), backend)
    return FlowSolution(flow)


def solve_with_potentials(instance: FCNFInstance, costs, *, backend: str | None = None):
    flow, pot = flow_network(instance).solve(_as_cost_array(instance, costs), backend)
    return FlowSolution(flow), pot


def dump_potentials(path, instance: FCNFInstance, costs, *, backend: str | None = None) -> FlowSolution:
    """Solve and write flows and final node potentials to ``path`` as JSON."""
    sol, pot = solve_with_potentials(instance, costs, backend=backend)
    payload = {"flow": sol.flow.tolist(), "potentials": pot.tolist()}
    with open(path, "w") as fh:
        json.dump(payload, fh)
    return sol


# -- residual-cycle machinery shared by the warm start and the verifier --------------


def _residual_edges(instance, cost, flow, eps):
    """Residual edges as (from, to, cost, arc, direction) with positive capacity."""
    edges = []
    for a in range(instance.arc_count):
        t, h = int(instance.tail[a]), int(instance.head[a])
        if instance.capacity[a] - flow[a] > eps:
            edges.append((t, h, float(cost[a]), a, 1))
        if flow[a] > eps:
            edges.append((h, t, -float(cost[a]), a, -1))
    return edges


def _bellman_ford(n, edges, tol):
    """Distances from a virtual root joined to every node at cost 0.

    Returns ``(dist, None)`` or ``(dist, cycle)`` where ``cycle`` lists the
    edge indices of a negative cycle.
    """
    dist = [0.0] * n
    pred = [-1] * n
    last = -1
    for _ in range(n):
        last = -1
        for k, (u, v, c, _a, _d) in enumerate(edges):
            if dist[u] + c < dist[v] - tol:
                dist[v] = dist[u] + c
                pred[v] = k
                last = v
        if last < 0:
            return dist, None
    v = last
    for _ in range(n):
        v = edges[pred[v]][0]
    cycle, u = [], v
    while True:
        k = pred[u]
        cycle.append(k)
        u = edges[k][0]
        if u == v:
            break
    cycle.reverse()
    return dist, cycle


def warm_start_solve(
    instance: FCNFInstance, costs, previous: FlowSolution, *, tol: float = 1e-9, max_cancellations: int = 100_000
) -> FlowSolution:
    """Re-optimize from a feasible flow by cancelling negative residual cycles."""
    cost = _as_cost_array(instance, costs)
    if len(previous.flow) != instance.arc_count:
        raise ValueError("previous solution does not match the instance")
    if check_feasibility(instance, previous):
        raise ValueError("previous solution is not feasible for this instance")
    flow = np.clip(previous.flow.astype(np.float64), 0.0, instance.capacity)
    scale = max(1.0, float(cost.max(initial=0.0)))
    for _ in range(max_cancellations):
        edges = _residual_edges(instance, cost, flow, 1e-12)
        _, cycle = _bellman_ford(instance.node_count, edges, tol * scale)
        if cycle is None:
            return FlowSolution(flow)
        delta = min(
            instance.capacity[edges[k][3]] - flow[edges[k][3]] if edges[k][4] > 0 else flow[edges[k][3]]
            for k in cycle
        )
        for k in cycle:
            flow[edges[k][3]] += edges[k][4] * delta
    raise RuntimeError("cycle cancelling did not converge")


@dataclass(frozen=True)
class OptimalityCertificate:
    optimal: bool
    potentials: np.ndarray
    worst_violation: float


def verify_optimality(instance: FCNFInstance, costs, sol: FlowSolution, tol: float = 1e-7) -> OptimalityCertificate:
    """Check that ``sol`` is a cost-minimal feasible flow.

    Finds potentials by Bellman-Ford on the residual network of ``sol``;
    optimality holds iff no negative residual cycle exists, equivalently every
    residual edge has reduced cost ``c + pi_u - pi_v >= 0``.
    """
    cost = _as_cost_array(instance, costs)
    if check_feasibility(instance, sol):
        return OptimalityCertificate(False, np.zeros(instance.node_count), float("inf"))
    flow = sol.flow
    edges = _residual_edges(instance, cost, flow, 1e-9)
    scale = max(1.0, float(cost.max(initial=0.0)))
    dist, cycle = _bellman_ford(instance.node_count, edges, 1e-12 * scale)
    pi = np.asarray(dist)
    worst = 0.0
    for u, v, c, _a, _d in edges:
        worst = max(worst, -(c + pi[u] - pi[v]))
    return OptimalityCertificate(cycle is None and worst <= tol * scale, pi, worst)
