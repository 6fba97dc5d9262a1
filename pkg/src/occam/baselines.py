"""Comparison attacks: differential evolution and plain (1+1)-CMA-ES."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .audio import AudioVector
from .driver import AttackConfig, AttackResult, TraceRow, run_occam
from .errors import BudgetExhausted, ValidationError
from .objective import AttackObjective


@dataclass(frozen=True)
class DeaConfig:
    population: int = 10
    generations: int = 3000
    weight: float = 0.5
    init_sigma: float = 0.003
    bias_cap: float = 0.2
    seed: int = 0
    # optional hard cap on oracle queries, on top of population * (generations + 1)
    total_queries: Optional[int] = None

    def __post_init__(self):
        if self.population < 4:
            raise ValidationError("DEA needs a population of at least 4")
        if self.weight <= 0:
            raise ValidationError("differential weight must be > 0")
        if self.generations < 0 or self.init_sigma < 0 or self.bias_cap < 0:
            raise ValidationError("generations, init_sigma and bias_cap must be >= 0")


def de_mutant(base, partner_a, partner_b, original, bias_draw: float, weight: float) -> np.ndarray:
    """``base + bias_draw * (original - base) + weight * (partner_a - partner_b)``."""
    base = np.asarray(base, dtype=np.float64)
    return base + bias_draw * (np.asarray(original) - base) + weight * (np.asarray(partner_a) - np.asarray(partner_b))


def draw_partners(rng: np.random.Generator, population: int, i: int):
    """Three distinct indices, all different from ``i``."""
    others = rng.choice(population - 1, size=3, replace=False)
    others[others >= i] += 1
    return int(others[0]), int(others[1]), int(others[2])


def build_mutants(pop: np.ndarray, original, rng, weight: float, bias_cap: float) -> np.ndarray:
    """One mutant per member, before clipping.

    Per member the rng supplies three partners, then one scalar bias draw.
    """
    NP = pop.shape[0]
    mutants = np.empty_like(pop)
    for i in range(NP):
        r1, r2, r3 = draw_partners(rng, NP, i)
        mutants[i] = de_mutant(pop[r1], pop[r2], pop[r3], original, rng.uniform(0.0, bias_cap), weight)
    return mutants


def run_dea(config: DeaConfig, objective: AttackObjective, original, initial_adversarial) -> AttackResult:
    """Elitist differential evolution around the initial adversarial audio.

    Members start as noisy copies of the start point; non-adversarial ones
    keep an infinite loss until a mutant replaces them. One trace row is
    written per generation.
    """
    rng = np.random.default_rng(config.seed)
    x = objective.original.samples
    start = initial_adversarial.samples if isinstance(initial_adversarial, AudioVector) else np.asarray(initial_adversarial, dtype=np.float64)
    if start.shape != x.shape:
        raise ValidationError("initial adversarial audio length differs from original")
    NP = config.population
    q0 = objective.queries
    trace = []
    exhausted = False

    def used():
        return objective.queries - q0

    def capped():
        return config.total_queries is not None and used() >= config.total_queries

    pop = np.clip(start + config.init_sigma * rng.standard_normal((NP, x.shape[0])), -1.0, 1.0)
    loss = np.full(NP, np.inf)

    def best_row():
        k = int(np.argmin(loss))
        trace.append(TraceRow(used(), used(), float(loss[k]), NP, "de", config.init_sigma))

    try:
        for i in range(NP):
            if capped():
                break
            val = objective.evaluate(pop[i])
            loss[i] = val.value if val.adversarial else np.inf
        best_row()
        for _ in range(config.generations):
            if capped():
                break
            mutants = build_mutants(pop, x, rng, config.weight, config.bias_cap)
            np.clip(mutants, -1.0, 1.0, out=mutants)
            for i in range(NP):
                if capped():
                    break
                val = objective.evaluate(mutants[i])
                if val.adversarial and val.value < loss[i]:
                    pop[i] = mutants[i]
                    loss[i] = val.value
            best_row()
    except BudgetExhausted:
        exhausted = True

    k = int(np.argmin(loss))
    found = np.isfinite(loss[k])
    return AttackResult(
        attack="dea",
        seed=config.seed,
        original=objective.original,
        adversarial=AudioVector(pop[k], objective.original.sample_rate) if found else None,
        final_distance=float(loss[k]),
        queries=used(),
        sampled=used(),
        trace=trace,
        budget_exhausted=exhausted,
    )


def run_evolutionary(config: AttackConfig, objective: AttackObjective, original, initial_adversarial) -> AttackResult:
    """The single-group attack: one (1+1)-CMA-ES over the whole vector, no adaptive grouping."""
    return run_occam(config.pinned(1, "SG"), objective, original, initial_adversarial,
                     attack_name="evolutionary")
