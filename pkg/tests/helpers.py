import numpy as np

from occam import AttackObjective, AudioVector, BallOracle, TargetSpec


def ball_problem(n, seed, radius_frac=0.3, start_frac=0.9):
    """Random original ``x`` and ball ``(t, r)`` with |x - t| > 2r, all inside [-0.5, 0.5]^n.

    The start point sits at ``start_frac * r`` from the center in a random
    direction, so projecting it toward ``x`` does not land on the optimum.
    Returns ``(x, t, r, start, optimum_distance)``.
    """
    rng = np.random.default_rng(10_000 + seed)
    x = rng.uniform(-0.5, 0.5, n)
    t = rng.uniform(-0.5, 0.5, n)
    d = float(np.linalg.norm(x - t))
    r = radius_frac * d
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    start = t + start_frac * r * u
    return x, t, r, start, d - r


def ball_objective(x, t, r, budget=None):
    oracle = BallOracle(t, r, budget=budget)
    return AttackObjective(oracle, AudioVector(x), TargetSpec.targeted("target"))
