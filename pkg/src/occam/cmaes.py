"""Biased (1+1)-CMA-ES with a diagonal covariance.

Offspring are drawn from ``N(x* + mu (x - x*), sigma^2 diag(C))``; the
diagonal ``C`` follows an evolution path updated on every accepted step,
and the bias ``mu`` follows the 1/5th success rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ValidationError

MU_UP = 1.5
MU_DOWN = 1.5 ** -0.25
SIGMA_FRACTION = 0.001


@dataclass
class CmaState:
    dim: int
    sigma: float = 0.0
    mu: float = 0.08
    cov_diag: np.ndarray = None
    path: np.ndarray = None
    c_c: float = 0.01
    c_cov: float = 0.001
    skipped_updates: int = field(default=0)

    def __post_init__(self):
        if self.cov_diag is None:
            self.cov_diag = np.ones(self.dim)
        if self.path is None:
            self.path = np.zeros(self.dim)


def init_state(dim: int, mu0: float = 0.08, c_c: float = 0.01, c_cov: float = 0.001) -> CmaState:
    if dim < 1:
        raise ValidationError("CMA-ES dimension must be >= 1")
    return CmaState(dim=dim, mu=mu0, c_c=c_c, c_cov=c_cov)


def draw_noise(state: CmaState, rng: np.random.Generator) -> np.ndarray:
    """z ~ N(0, sigma^2 diag(C))."""
    z = rng.standard_normal(state.dim)
    z *= state.sigma * np.sqrt(state.cov_diag)
    return z


def sample_offspring(state: CmaState, x_sub, xstar_sub, rng: np.random.Generator):
    """Draw one candidate subvector; returns ``(candidate, z)``."""
    x_sub = np.ascontiguousarray(x_sub, dtype=np.float64)
    xstar_sub = np.ascontiguousarray(xstar_sub, dtype=np.float64)
    z = draw_noise(state, rng)
    cand = np.empty(state.dim)
    kernels.biased_offspring(xstar_sub, x_sub, z, state.mu, cand)
    return cand, z


def update_on_success(state: CmaState, z) -> None:
    """Evolution-path and diagonal-covariance update for an accepted step ``z``."""
    if state.sigma == 0.0:
        state.skipped_updates += 1
        return
    kernels.evolution_update(state.path, state.cov_diag, np.ascontiguousarray(z, dtype=np.float64),
                             state.sigma, state.c_c, state.c_cov)


def adapt_mu(state: CmaState, success: bool) -> None:
    state.mu *= MU_UP if success else MU_DOWN


def set_sigma_from_distance(state: CmaState, distance: float) -> None:
    if distance < 0:
        raise ValidationError("distance must be >= 0")
    state.sigma = SIGMA_FRACTION * distance
