"""Parameterized dynamic slope scaling (psi-DSSP) for fixed-charge network flow."""

from .model import (
    FCNFInstance,
    FlowSolution,
    NetworkCharacteristics,
    characteristics,
    check_feasibility,
    true_objective,
)

__version__ = "0.1.0"

__all__ = [
    "FCNFInstance",
    "FlowSolution",
    "NetworkCharacteristics",
    "characteristics",
    "check_feasibility",
    "true_objective",
]
