"""Occam main loop: cooperative co-evolution over a biased (1+1)-CMA-ES."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from . import kernels
from .audio import AudioVector, snr_db
from .boundary import bisect_segment, check_start
from .cmaes import SIGMA_FRACTION, CmaState, adapt_mu, draw_noise, update_on_success
from .errors import BudgetExhausted, UndefinedSNRError, ValidationError
from .grouping import GroupingState, partition, pilot_and_resize, record_cycle_reward, select_strategy
from .objective import AttackObjective

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttackConfig:
    total_queries: int
    binary_search_steps: int = 15
    offsprings: int = 30
    mu0: float = 0.08
    c_c: float = 0.01
    c_cov: float = 0.001
    seed: int = 0
    # adaptive=False pins m=initial_m and the strategy, and disables pilots
    adaptive: bool = True
    initial_m: int = 1
    strategy: Optional[str] = None

    def __post_init__(self):
        if self.total_queries <= self.binary_search_steps:
            raise ValidationError("total_queries must exceed binary_search_steps")
        if self.offsprings < 1:
            raise ValidationError("offsprings must be >= 1")
        if self.binary_search_steps < 1:
            raise ValidationError("binary_search_steps must be >= 1")
        if self.initial_m < 1:
            raise ValidationError("initial_m must be >= 1")

    def pinned(self, m: int = 1, strategy: str = "SG") -> "AttackConfig":
        return replace(self, adaptive=False, initial_m=m, strategy=strategy)


@dataclass(frozen=True)
class TraceRow:
    queries: int
    sampled: int
    best_distance: float
    m: int
    strategy: str
    sigma: float


@dataclass
class AttackResult:
    attack: str
    seed: int
    original: AudioVector
    adversarial: Optional[AudioVector]
    final_distance: float
    queries: int
    sampled: int
    trace: List[TraceRow] = field(default_factory=list)
    budget_exhausted: bool = False

    @property
    def success(self) -> bool:
        return self.adversarial is not None and bool(np.isfinite(self.final_distance))

    @property
    def snr_db(self) -> Optional[float]:
        if not self.success:
            return None
        try:
            return snr_db(self.original, self.adversarial)
        except UndefinedSNRError:
            return None


def _samples(a) -> np.ndarray:
    return a.samples if isinstance(a, AudioVector) else np.asarray(a, dtype=np.float64).reshape(-1)


def _check_group(group, n):
    g = np.asarray(group, dtype=np.intp)
    if g.ndim != 1 or (g.size and (g.min() < 0 or g.max() >= n)):
        raise ValidationError(f"group indices out of range [0, {n})")
    return np.ascontiguousarray(g)


def extract_subspace(original, xstar, cov, group):
    """Gather ``(x_sub, xstar_sub, cov_sub)`` in the group's index order."""
    x, xs, c = _samples(original), _samples(xstar), np.asarray(cov, dtype=np.float64)
    g = _check_group(group, x.shape[0])
    return x[g], xs[g], c[g]


def embed_subspace(xstar: np.ndarray, cov: np.ndarray, group, xstar_sub, cov_sub) -> None:
    """Scatter subspace values back into the global arrays, in place."""
    g = _check_group(group, xstar.shape[0])
    xstar_sub = np.asarray(xstar_sub, dtype=np.float64)
    cov_sub = np.asarray(cov_sub, dtype=np.float64)
    if xstar_sub.shape != g.shape or cov_sub.shape != g.shape:
        raise ValidationError("subspace vectors must match the group size")
    xstar[g] = xstar_sub
    cov[g] = cov_sub


class _Run:
    """Mutable state of one attack run.

    ``xstar`` is a working buffer that always holds the incumbent, except
    transiently while a candidate subvector is written into it for a query.
    """

    def __init__(self, config: AttackConfig, objective: AttackObjective, start: np.ndarray):
        self.cfg = config
        self.obj = objective
        self.rng = np.random.default_rng(config.seed)
        self.x = np.ascontiguousarray(objective.original.samples)
        self.n = self.x.shape[0]
        self.xstar = np.array(start, dtype=np.float64)
        self.cov = np.ones(self.n)
        self.path = np.zeros(self.n)
        self.mu = config.mu0
        self.sigma = 0.0
        self.dist = float("inf")
        self.q0 = objective.queries
        self.sampled = 0
        self.trace: List[TraceRow] = []

    @property
    def used(self) -> int:
        return self.obj.queries - self.q0

    def out_of_budget(self) -> bool:
        return self.used >= self.cfg.total_queries or self.obj.oracle.ledger.exhausted

    def accept(self, dist: float):
        self.dist = dist
        self.sigma = SIGMA_FRACTION * dist

    def log_row(self, m: int, strategy: str):
        self.trace.append(TraceRow(self.used, self.sampled, self.dist, m, strategy, self.sigma))

    def project_to_boundary(self):
        point, val = bisect_segment(self.obj, self.x, self.xstar.copy(), self.cfg.binary_search_steps, clip=True)
        if val is not None and val.value < self.dist:
            self.xstar[:] = point
            self.accept(val.value)

    def optimize_group(self, group: np.ndarray):
        """Lambda offspring of the subspace CMA-ES on one group, greedy acceptance."""
        s = group.shape[0]
        x_sub = np.empty(s)
        xs_sub = np.empty(s)
        kernels.gather(self.x, group, x_sub)
        kernels.gather(self.xstar, group, xs_sub)
        st = CmaState(dim=s, sigma=self.sigma, mu=self.mu, cov_diag=self.cov[group],
                      path=self.path[group], c_c=self.cfg.c_c, c_cov=self.cfg.c_cov)
        cand = np.empty(s)
        try:
            for _ in range(self.cfg.offsprings):
                z = draw_noise(st, self.rng)
                cand_sq, inc_sq = kernels.biased_offspring(xs_sub, x_sub, z, st.mu, cand)
                self.sampled += 1
                if cand_sq >= inc_sq:
                    # farther than the incumbent: rejected without a query
                    adapt_mu(st, False)
                    continue
                kernels.scatter(self.xstar, group, cand)
                try:
                    val = self.obj.evaluate(self.xstar)
                except BaseException:
                    kernels.scatter(self.xstar, group, xs_sub)
                    raise
                if val.adversarial and val.value < self.dist:
                    xs_sub[:] = cand
                    update_on_success(st, z)
                    self.accept(val.value)
                    st.sigma = self.sigma
                    adapt_mu(st, True)
                else:
                    kernels.scatter(self.xstar, group, xs_sub)
                    adapt_mu(st, False)
        finally:
            self.cov[group] = st.cov_diag
            self.path[group] = st.path
            self.mu = st.mu


def run_occam(config: AttackConfig, objective: AttackObjective, original, initial_adversarial,
              attack_name: str = "occam") -> AttackResult:
    """Run the cooperative co-evolution attack from ``initial_adversarial``.

    Spends two queries validating the start points, then alternates boundary
    projection, strategy/size selection and per-group CMA-ES sweeps until
    ``config.total_queries`` is reached. Raises :class:`InvalidStart` when
    the start points are not (adversarial, benign).
    """
    x0 = _samples(original)
    if not np.array_equal(x0, objective.original.samples):
        raise ValidationError("original audio differs from the objective's original")
    if not isinstance(initial_adversarial, AudioVector):
        initial_adversarial = AudioVector(initial_adversarial, objective.original.sample_rate)
    start = initial_adversarial.samples
    if start.shape != x0.shape:
        raise ValidationError("initial adversarial audio length differs from original")

    run = _Run(config, objective, start)
    run.accept(check_start(objective, original, initial_adversarial).value)
    gstate = GroupingState(n=run.n, m=min(config.initial_m, run.n))
    pinned_strategy = config.strategy
    if not config.adaptive and pinned_strategy is None:
        pinned_strategy = "SG"
    run.log_row(gstate.m, "")
    exhausted = False

    try:
        while not run.out_of_budget():
            run.project_to_boundary()
            strategy = select_strategy(gstate, run.rng, pool=pinned_strategy)
            groups = partition(run.n, gstate.m, strategy, run.cov, run.rng)
            v = run.dist
            finished = True
            for g in groups:
                if run.out_of_budget():
                    finished = False
                    break
                run.optimize_group(g)
            run.log_row(gstate.m, strategy)
            log.debug("cycle done: queries=%d dist=%.6g m=%d strategy=%s", run.used, run.dist, gstate.m, strategy)
            if not (finished and config.adaptive):
                continue
            record_cycle_reward(gstate, strategy, v, run.dist)

            def pilot(m_cand, strategy=strategy):
                before = run.dist
                if run.out_of_budget():
                    return before, before
                run.optimize_group(partition(run.n, m_cand, strategy, run.cov, run.rng)[0])
                return before, run.dist

            pilot_and_resize(gstate, pilot)
    except BudgetExhausted:
        exhausted = True
        run.log_row(gstate.m, "")

    rate = original.sample_rate if isinstance(original, AudioVector) else objective.original.sample_rate
    return AttackResult(
        attack=attack_name,
        seed=config.seed,
        original=objective.original,
        adversarial=AudioVector(run.xstar, rate),
        final_distance=run.dist,
        queries=run.used,
        sampled=run.sampled,
        trace=run.trace,
        budget_exhausted=exhausted or objective.oracle.ledger.exhausted,
    )
