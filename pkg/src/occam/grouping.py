"""Adaptive variable decomposition for cooperative co-evolution.

Four grouping strategies compete through softmax-weighted rewards, and the
group count ``m`` is halved or doubled based on cheap pilot optimizations of
a single subgroup at the neighbouring sizes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import ValidationError

STRATEGIES = ("SG", "RG", "MiVG", "MaVG")

Partition = List[np.ndarray]


@dataclass
class GroupingState:
    n: int
    m: int = 1
    rewards: np.ndarray = field(default_factory=lambda: np.zeros(len(STRATEGIES)))
    # (delta_{m/2}, delta_m, delta_{2m}); 0 means "no record"
    size_records: np.ndarray = field(default_factory=lambda: np.zeros(3))
    last_best: Optional[float] = None

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValidationError(f"group count m={self.m} outside [1, {self.n}]")


def strategy_probabilities(rewards) -> np.ndarray:
    r = np.asarray(rewards, dtype=np.float64)
    e = np.exp(r - r.max())
    return e / e.sum()


def select_strategy(state: GroupingState, rng: np.random.Generator, pool: Optional[str] = None) -> str:
    """Draw a strategy name; ``pool`` pins a single strategy and skips the draw."""
    if pool is not None:
        if pool not in STRATEGIES:
            raise ValidationError(f"unknown grouping strategy {pool!r}")
        return pool
    cdf = np.cumsum(strategy_probabilities(state.rewards))
    k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return STRATEGIES[min(k, len(STRATEGIES) - 1)]


def _split(order: np.ndarray, m: int) -> Partition:
    n = order.shape[0]
    base, extra = divmod(n, m)
    groups, start = [], 0
    for g in range(m):
        size = base + (1 if g < extra else 0)
        groups.append(order[start:start + size])
        start += size
    return groups


def partition(n: int, m: int, strategy: str, cov_diag=None,
              rng: Optional[np.random.Generator] = None) -> Partition:
    """Split ``range(n)`` into ``m`` disjoint non-empty index arrays.

    Group sizes are ``n // m`` with the first ``n % m`` groups one larger.
    MiVG chunks the indices sorted by covariance diagonal (similar values
    together); MaVG deals that sorted order round-robin (spread values apart).
    """
    if not 1 <= m <= n:
        raise ValidationError(f"cannot split {n} variables into {m} groups")
    if strategy == "SG":
        order = np.arange(n, dtype=np.intp)
    elif strategy == "RG":
        if rng is None:
            raise ValidationError("random grouping needs an rng")
        order = rng.permutation(n).astype(np.intp)
    elif strategy in ("MiVG", "MaVG"):
        cov = np.asarray(cov_diag, dtype=np.float64)
        if cov.shape != (n,):
            raise ValidationError("cov_diag must have length n")
        order = np.argsort(cov, kind="stable").astype(np.intp)
        if strategy == "MaVG":
            return [np.ascontiguousarray(order[g::m]) for g in range(m)]
    else:
        raise ValidationError(f"unknown grouping strategy {strategy!r}")
    return [np.ascontiguousarray(g) for g in _split(order, m)]


def _relative_gain(v: float, v_new: float, scale: float = 1.0) -> float:
    if v == 0:
        return 0.0
    return abs((v - v_new) / (v * scale))


def record_cycle_reward(state: GroupingState, strategy: str, v: float, v_new: float) -> float:
    r = _relative_gain(v, v_new, state.m)
    state.rewards[STRATEGIES.index(strategy)] = r
    state.size_records[1] = r
    return r


def pilot_and_resize(state: GroupingState, run_pilot: Callable[[int], Tuple[float, float]]) -> int:
    """Fill missing neighbour-size records by pilot runs, then move ``m``.

    ``run_pilot(m_candidate)`` must optimize the first group of an
    ``m_candidate``-way partition and return ``(v, v_new)``.
    """
    rec = state.size_records
    m = state.m
    if rec[0] == 0 and m // 2 >= 1:
        rec[0] = _relative_gain(*run_pilot(m // 2))
    if rec[2] == 0 and 2 * m <= state.n:
        rec[2] = _relative_gain(*run_pilot(2 * m))
    half, cur, dbl = rec
    if half > cur and half > dbl and m // 2 >= 1:
        state.m = m // 2
        state.size_records = np.array([0.0, half, cur])
    elif dbl > half and dbl > cur and 2 * m <= state.n:
        state.m = 2 * m
        state.size_records = np.array([cur, dbl, 0.0])
    elif half == cur == dbl == 0 and 2 * m <= state.n:
        # no size made any progress: subspaces too large for the step size
        state.m = 2 * m
    return state.m
