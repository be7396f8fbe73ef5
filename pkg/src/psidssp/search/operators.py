"""Acceptance rule, cooling schedules, neighbor moves and PSO updates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TINY_TEMPERATURE = 1e-300  # keeps 1/T finite once a schedule underflows


def clamp(x: float, bounds: tuple[float, float] | None) -> float:
    if bounds is None:
        return x
    lo, hi = bounds
    return min(max(x, lo), hi)


def reflect(x: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    if x < lo:
        x = 2 * lo - x
    elif x > hi:
        x = 2 * hi - x
    return min(max(x, lo), hi)


def sa_accept_probability(z_c: float, z_i: float, T_i: float) -> float:
    """exp((1 - z_c/z_i) / T_i), capped at 1: acceptance depends on the relative change."""
    if z_i <= 0:
        raise ValueError("current objective must be positive")
    if T_i <= 0:
        raise ValueError("temperature must be positive")
    exponent = (1.0 - z_c / z_i) / T_i
    return 1.0 if exponent >= 0 else math.exp(exponent)


def sa_accept(z_c: float, z_i: float, T_i: float, rng: np.random.Generator) -> bool:
    """Metropolis step; a draw is consumed only for worse candidates."""
    if z_c <= z_i:
        return True
    return rng.random() < sa_accept_probability(z_c, z_i, T_i)


def boltzmann_temperature(T_0: float, i: float) -> float:
    if T_0 <= 0:
        raise ValueError("T_0 must be positive")
    if i <= 0:
        raise ValueError("Boltzmann schedule is defined for i >= 1")
    return T_0 / math.log(1.0 + i)


def vfa_temperature(T_0: float, i: float) -> float:
    if T_0 <= 0:
        raise ValueError("T_0 must be positive")
    return T_0 * math.exp(-i / math.e)


def boltzmann_neighbor(psi_i, T_i, rng=None, *, v=None, bounds=None) -> float:
    """Gaussian step: half of sqrt(T) scaled while sqrt(T) < 2/3, else a third."""
    if v is None:
        v = rng.standard_normal()
    root = math.sqrt(T_i)
    step = 0.5 * v * root if root < 2.0 / 3.0 else v / 3.0
    return clamp(psi_i + step, bounds)


def vfa_neighbor(psi_i, T_i, rng=None, *, u=None, bounds=None) -> float:
    """Very-fast-annealing step; up when u < 0.5, down otherwise."""
    if u is None:
        u = rng.random()
    T = max(T_i, TINY_TEMPERATURE)
    magnitude = T * ((1.0 + 1.0 / T) ** abs(2.0 * u - 1.0) - 1.0)
    step = magnitude if u < 0.5 else -magnitude
    return clamp(psi_i + step, bounds)


def tabu_bands(h_0: float, h_k: float, k: int) -> list[float]:
    """Band boundaries h_0..h_k, halving inward from h_k."""
    if k < 1:
        raise ValueError("need at least one band")
    if not 0 < h_0 < h_k:
        raise ValueError("need 0 < h_0 < h_k")
    h = [h_0] + [h_k / 2 ** (k - j) for j in range(1, k)] + [h_k]
    if any(b <= a for a, b in zip(h, h[1:])):
        raise ValueError(f"band boundaries are not increasing: {h} (h_0 too large for k={k})")
    return h


def pso_inertia(w_max: float, w_min: float, i: int, i_max: int) -> float:
    if not 0 <= i <= i_max:
        raise ValueError(f"iteration {i} outside [0, {i_max}]")
    return w_max - i / i_max * (w_max - w_min)


@dataclass
class Particle:
    position: float
    velocity: float
    pbest_psi: float
    pbest_objective: float = math.inf


def pso_velocity_update(
    p: Particle,
    gbest_psi: float,
    w_i: float,
    c_1: float,
    c_2: float,
    v_max: float,
    rng: np.random.Generator | None = None,
    *,
    r=None,
) -> float:
    """Inertia plus random pulls toward the particle's and swarm's best, clamped to +-v_max."""
    r_1, r_2 = (rng.random(), rng.random()) if r is None else r
    x = p.position
    v = w_i * p.velocity + c_1 * r_1 * (p.pbest_psi - x) + c_2 * r_2 * (gbest_psi - x)
    return min(max(v, -v_max), v_max)
