"""Random connected FCNF instances with high fixed-to-variable cost ratios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FCNFInstance

SUPPLY, DEMAND, TRANSSHIP = 0, 1, 2


@dataclass(frozen=True)
class GeneratorParams:
    node_count: int
    seed: int = 0
    supply_prob: float = 0.2
    demand_prob: float = 0.2
    transship_prob: float = 0.6
    variable_cost_range: tuple[float, float] = (0.0, 20.0)
    fixed_cost_range: tuple[float, float] = (20000.0, 60000.0)
    supply_range: tuple[int, int] = (1000, 2000)

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("need at least two nodes")
        probs = (self.supply_prob, self.demand_prob, self.transship_prob)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"role probabilities must be non-negative and sum to 1, got {probs}")
        for name in ("variable_cost_range", "fixed_cost_range", "supply_range"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi <= lo:
                raise ValueError(f"{name} must satisfy 0 <= low < high, got {(lo, hi)}")
        if self.supply_range[0] < 1:
            raise ValueError("supplies must be at least one unit")


def _assign_roles(n: int, params: GeneratorParams, rng: np.random.Generator) -> np.ndarray:
    p = [params.supply_prob, params.demand_prob, params.transship_prob]
    roles = rng.choice(3, size=n, p=p)
    for needed in (SUPPLY, DEMAND):
        if (roles == needed).any():
            continue
        pool = np.flatnonzero(roles == TRANSSHIP)
        if len(pool) == 0:
            # no transshipment node to convert: take one from the other role, which has >= 2 members
            other = DEMAND if needed == SUPPLY else SUPPLY
            pool = np.flatnonzero(roles == other)
        roles[rng.choice(pool)] = needed
    return roles


def _random_edges(n: int, edge_count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Random spanning tree plus uniformly chosen extra edges, as sorted (i, j) pairs with i < j."""
    order = rng.permutation(n)
    edges = set()
    for k in range(1, n):
        u, v = int(order[k]), int(order[rng.integers(k)])
        edges.add((min(u, v), max(u, v)))
    extra = edge_count - (n - 1)
    if extra > 0:
        rest = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
        for idx in rng.choice(len(rest), size=extra, replace=False):
            edges.add(rest[idx])
    return sorted(edges)


def _split_demand(total: int, parts: int, rng: np.random.Generator) -> list[int]:
    """Random positive integer composition of ``total``; rounding remainder goes to the last part."""
    base = np.ones(parts, dtype=np.int64)
    spare = total - parts
    w = rng.random(parts)
    share = np.floor(spare * w / w.sum()).astype(np.int64)
    base += share
    base[-1] += total - int(base.sum())
    return base.tolist()


def generate_instance(params: GeneratorParams, name: str = "") -> FCNFInstance:
    n = params.node_count
    rng = np.random.default_rng(params.seed)
    edge_count = int(rng.integers(n - 1, n * (n - 1) // 2, endpoint=True))
    edges = _random_edges(n, edge_count, rng)
    roles = _assign_roles(n, params, rng)

    supply_nodes = np.flatnonzero(roles == SUPPLY)
    demand_nodes = np.flatnonzero(roles == DEMAND)
    lo, hi = params.supply_range
    supplies = rng.integers(lo, hi, size=len(supply_nodes), endpoint=True)
    S = int(supplies.sum())
    if S < len(demand_nodes):
        raise ValueError("total supply is too small to give every demand node a unit")
    requirement = np.zeros(n)
    requirement[supply_nodes] = supplies
    requirement[demand_nodes] = -np.asarray(_split_demand(S, len(demand_nodes), rng), dtype=float)

    arcs = []
    clo, chi = params.variable_cost_range
    flo, fhi = params.fixed_cost_range
    for i, j in edges:
        for t, h in ((i, j), (j, i)):
            arcs.append((t, h, float(rng.uniform(clo, chi)), float(rng.uniform(flo, fhi)), float(S)))
    return FCNFInstance.from_arcs(n, arcs, requirement, uncapacitated=True, name=name)


def suite_seed(seed: int, level: int, index: int) -> int:
    """Per-instance seed derived from the suite seed, level position and index."""
    ss = np.random.SeedSequence([seed, level, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def generate_suite(
    node_levels, count_per_level: int, seed: int, *, verify: bool = True, **overrides
) -> list[FCNFInstance]:
    """Deterministic suite; every instance is checked by one min-cost-flow solve."""
    from .flow import solve_min_cost_flow

    if count_per_level < 1:
        raise ValueError("count_per_level must be at least 1")
    suite = []
    for j, n in enumerate(node_levels):
        for i in range(count_per_level):
            params = GeneratorParams(node_count=n, seed=suite_seed(seed, j, i), **overrides)
            inst = generate_instance(params, name=f"n{n}_{i:03d}")
            if verify:
                solve_min_cost_flow(inst, inst.variable_cost)
            suite.append(inst)
    return suite
