from ._backend import BACKEND, available
from .solver import (
    FlowNetwork,
    InfeasibleFlowError,
    LinearArcCosts,
    OptimalityCertificate,
    dump_potentials,
    flow_network,
    solve_min_cost_flow,
    solve_with_potentials,
    verify_optimality,
    warm_start_solve,
)

__all__ = [
    "BACKEND",
    "FlowNetwork",
    "InfeasibleFlowError",
    "LinearArcCosts",
    "OptimalityCertificate",
    "available",
    "dump_potentials",
    "flow_network",
    "solve_min_cost_flow",
    "solve_with_potentials",
    "verify_optimality",
    "warm_start_solve",
]
