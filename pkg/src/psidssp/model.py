"""FCNF instance and flow data model, objective evaluation and feasibility."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

OPEN_TOLERANCE = 1e-9  # a flow above this counts as opening the arc
BALANCE_TOLERANCE = 1e-6


class InstanceError(ValueError):
    """Raised when an instance violates a structural invariant."""


class DimensionError(ValueError):
    """Raised when a solution does not match the instance it is evaluated on."""


class UndefinedCharacteristicError(ValueError):
    pass


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FCNFInstance:
    """A single-commodity fixed-charge network flow instance.

    Arrays are copied and made read-only at construction so instances can be
    shared between workers.

    Parameters
    ----------
    node_count : int
        Number of nodes; node ids are ``0..node_count-1``.
    tail, head : array of int
        Arc endpoints, one entry per directed arc.
    requirement : array of float
        Per-node requirement (positive supply, negative demand).
    variable_cost, fixed_cost, capacity : array of float
        Per-arc cost per unit, cost of opening, and flow upper bound.
    uncapacitated : bool
        When set, every capacity must be at least the total supply.
    name : str
        Free-form label, carried through I/O and reports.
    """

    node_count: int
    tail: np.ndarray
    head: np.ndarray
    requirement: np.ndarray
    variable_cost: np.ndarray
    fixed_cost: np.ndarray
    capacity: np.ndarray
    uncapacitated: bool = False
    name: str = ""

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "tail", _frozen_array(self.tail, np.int64))
        set_(self, "head", _frozen_array(self.head, np.int64))
        for name in ("requirement", "variable_cost", "fixed_cost", "capacity"):
            set_(self, name, _frozen_array(getattr(self, name), np.float64))
        self.validate()

    @classmethod
    def from_arcs(
        cls,
        node_count: int,
        arcs,
        requirement,
        *,
        uncapacitated: bool = False,
        name: str = "",
    ) -> "FCNFInstance":
        """Build from ``(tail, head, variable_cost, fixed_cost, capacity)`` tuples."""
        arcs = list(arcs)
        cols = list(zip(*arcs)) if arcs else [(), (), (), (), ()]
        return cls(
            node_count=node_count,
            tail=cols[0],
            head=cols[1],
            requirement=requirement,
            variable_cost=cols[2],
            fixed_cost=cols[3],
            capacity=cols[4],
            uncapacitated=uncapacitated,
            name=name,
        )

    def validate(self) -> None:
        n, m = self.node_count, len(self.tail)
        if n < 1:
            raise InstanceError("node_count must be positive")
        if len(self.requirement) != n:
            raise InstanceError(f"expected {n} requirements, got {len(self.requirement)}")
        for name in ("head", "variable_cost", "fixed_cost", "capacity"):
            if len(getattr(self, name)) != m:
                raise InstanceError(f"arc field {name!r} has wrong length")
        if m:
            bad = (self.tail < 0) | (self.tail >= n) | (self.head < 0) | (self.head >= n)
            if bad.any():
                a = int(np.flatnonzero(bad)[0])
                raise InstanceError(
                    f"arc {a} ({self.tail[a]}->{self.head[a]}) references a node outside [0, {n})"
                )
            if (self.tail == self.head).any():
                raise InstanceError(f"self-loop at arc {int(np.flatnonzero(self.tail == self.head)[0])}")
        for name in ("requirement", "variable_cost", "fixed_cost", "capacity"):
            if not np.isfinite(getattr(self, name)).all():
                raise InstanceError(f"non-finite value in {name}")
        if (self.variable_cost < 0).any() or (self.fixed_cost < 0).any():
            raise InstanceError("negative costs are not supported")
        if (self.capacity <= 0).any():
            raise InstanceError("capacities must be positive")
        imbalance = float(self.requirement.sum())
        if abs(imbalance) > BALANCE_TOLERANCE:
            raise InstanceError(f"requirements are unbalanced: sum = {imbalance:g}")
        if self.uncapacitated and m and (self.capacity < self.total_supply - BALANCE_TOLERANCE).any():
            raise InstanceError("uncapacitated instance has a capacity below total supply")

    @property
    def arc_count(self) -> int:
        return len(self.tail)

    @property
    def total_supply(self) -> float:
        return float(self.requirement[self.requirement > 0].sum())

    @cached_property
    def fingerprint(self) -> str:
        """Content hash; equal for field-identical instances."""
        h = hashlib.sha1()
        h.update(np.int64(self.node_count).tobytes())
        for arr in (self.tail, self.head, self.requirement, self.variable_cost, self.fixed_cost, self.capacity):
            h.update(arr.tobytes())
        return h.hexdigest()

    def same_as(self, other: "FCNFInstance") -> bool:
        return (
            self.node_count == other.node_count
            and self.uncapacitated == other.uncapacitated
            and self.name == other.name
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("tail", "head", "requirement", "variable_cost", "fixed_cost", "capacity")
            )
        )

    def restricted(self, arc_mask) -> "FCNFInstance":
        """Sub-instance keeping only arcs where ``arc_mask`` is true."""
        keep = np.asarray(arc_mask, dtype=bool)
        return FCNFInstance(
            node_count=self.node_count,
            tail=self.tail[keep],
            head=self.head[keep],
            requirement=self.requirement,
            variable_cost=self.variable_cost[keep],
            fixed_cost=self.fixed_cost[keep],
            capacity=self.capacity[keep],
            name=self.name,
        )


@dataclass(frozen=True, eq=False)
class FlowSolution:
    flow: np.ndarray
    open_tolerance: float = OPEN_TOLERANCE

    def __post_init__(self):
        object.__setattr__(self, "flow", _frozen_array(self.flow, np.float64))

    @property
    def open(self) -> np.ndarray:
        return self.flow > self.open_tolerance

    @property
    def arcs_open(self) -> int:
        return int(np.count_nonzero(self.open))


def _check_dims(instance: FCNFInstance, sol: FlowSolution) -> None:
    if len(sol.flow) != instance.arc_count:
        raise DimensionError(f"solution has {len(sol.flow)} arcs, instance has {instance.arc_count}")


def true_objective(instance: FCNFInstance, sol: FlowSolution) -> float:
    """Variable cost of the flow plus the fixed cost of every open arc."""
    _check_dims(instance, sol)
    x = sol.flow
    return float(instance.variable_cost @ x + instance.fixed_cost[x > sol.open_tolerance].sum())


def node_imbalance(instance: FCNFInstance, flow) -> np.ndarray:
    """Outflow minus inflow minus requirement, per node."""
    out = np.bincount(instance.tail, weights=flow, minlength=instance.node_count)
    inn = np.bincount(instance.head, weights=flow, minlength=instance.node_count)
    return out - inn - instance.requirement


@dataclass(frozen=True)
class Violation:
    kind: str  # "conservation", "capacity" or "negative"
    index: int  # node id for conservation, arc index otherwise
    magnitude: float


def check_feasibility(instance: FCNFInstance, sol: FlowSolution, tol: float = BALANCE_TOLERANCE) -> list[Violation]:
    _check_dims(instance, sol)
    x = sol.flow
    found = []
    for i, r in enumerate(node_imbalance(instance, x)):
        if abs(r) > tol:
            found.append(Violation("conservation", i, float(abs(r))))
    for a in np.flatnonzero(x < -tol):
        found.append(Violation("negative", int(a), float(-x[a])))
    over = x - instance.capacity
    for a in np.flatnonzero(over > tol):
        found.append(Violation("capacity", int(a), float(over[a])))
    return found


@dataclass(frozen=True)
class NetworkCharacteristics:
    density: float
    supply_fraction: float
    demand_fraction: float
    mean_supply: float
    cost_ratio: float
    gamma: float
    total_supply: float
    supply_node_count: int

    FIELDS = ("density", "supply_fraction", "demand_fraction", "mean_supply", "cost_ratio", "gamma")

    def as_dict(self) -> dict:
        return {
            "density": self.density,
            "supply_fraction": self.supply_fraction,
            "demand_fraction": self.demand_fraction,
            "mean_supply": self.mean_supply,
            "cost_ratio": self.cost_ratio,
            "gamma": self.gamma,
            "total_supply": self.total_supply,
            "supply_node_count": self.supply_node_count,
        }


def characteristics(instance: FCNFInstance) -> NetworkCharacteristics:
    n, m = instance.node_count, instance.arc_count
    if n < 2:
        raise UndefinedCharacteristicError("density needs at least two nodes")
    r = instance.requirement
    n_s = int(np.count_nonzero(r > 0))
    n_d = int(np.count_nonzero(r < 0))
    if n_s == 0:
        raise UndefinedCharacteristicError("instance has no supply node")
    sum_c = float(instance.variable_cost.sum())
    if sum_c == 0:
        raise UndefinedCharacteristicError("total variable cost is zero")
    S = instance.total_supply
    theta = S / n_s
    phi = float(instance.fixed_cost.sum()) / sum_c
    return NetworkCharacteristics(
        density=m / (2 * math.comb(n, 2)),
        supply_fraction=n_s / n,
        demand_fraction=n_d / n,
        mean_supply=theta,
        cost_ratio=phi,
        gamma=theta / phi,
        total_supply=S,
        supply_node_count=n_s,
    )
