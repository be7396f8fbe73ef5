"""Metaheuristic searches for a good psi."""

from .annealing import BOLTZMANN, VFA, run_simulated_annealing
from .config import HistoryEntry, SearchConfig, SearchResult, load_config, write_history_csv
from .operators import (
    Particle,
    boltzmann_neighbor,
    boltzmann_temperature,
    pso_inertia,
    pso_velocity_update,
    sa_accept,
    sa_accept_probability,
    tabu_bands,
    vfa_neighbor,
    vfa_temperature,
)
from .swarm import run_pso
from .tabu import run_tabu_search

STRATEGIES = ("sab", "savf", "ts", "pso")


def run_strategy(name: str, instance, config: SearchConfig | None = None, evaluator=None) -> SearchResult:
    if name == "sab":
        return run_simulated_annealing(instance, config, BOLTZMANN, evaluator)
    if name == "savf":
        return run_simulated_annealing(instance, config, VFA, evaluator)
    if name == "ts":
        return run_tabu_search(instance, config, evaluator)
    if name == "pso":
        return run_pso(instance, config, evaluator)
    raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")


__all__ = [
    "BOLTZMANN",
    "STRATEGIES",
    "VFA",
    "HistoryEntry",
    "Particle",
    "SearchConfig",
    "SearchResult",
    "boltzmann_neighbor",
    "boltzmann_temperature",
    "load_config",
    "pso_inertia",
    "pso_velocity_update",
    "run_pso",
    "run_simulated_annealing",
    "run_strategy",
    "run_tabu_search",
    "sa_accept",
    "sa_accept_probability",
    "tabu_bands",
    "vfa_neighbor",
    "vfa_temperature",
    "write_history_csv",
]
