"""Bisection along the original -> adversarial segment toward the decision boundary."""
from __future__ import annotations

import numpy as np

from .audio import AudioVector
from .errors import InvalidStart, ValidationError
from .objective import AttackObjective, ObjectiveValue


def _arr(a):
    return a.samples if isinstance(a, AudioVector) else np.asarray(a, dtype=np.float64)


def check_start(objective: AttackObjective, original, adversarial) -> ObjectiveValue:
    """Spend two queries confirming ``adversarial`` is adversarial and ``original`` is not.

    Returns the objective value of ``adversarial``.
    """
    val = objective.evaluate(adversarial)
    if not val.adversarial:
        raise InvalidStart("initial point is not adversarial")
    if objective.evaluate(original).adversarial:
        raise InvalidStart("original audio is already adversarial")
    return val


def bisect_segment(objective: AttackObjective, original, adversarial, b: int = 15, clip: bool = False):
    """Run ``b`` bisection steps; return ``(point, value)``.

    ``value`` is the objective value observed for ``point`` during the search,
    or None when no midpoint was adversarial (``point`` is then ``adversarial``
    itself and was not re-queried). ``clip`` clamps probe points to [-1, 1]
    against rounding drift.
    """
    if b < 1:
        raise ValidationError("binary search needs b >= 1")
    x, adv = _arr(original), _arr(adversarial)
    direction = adv - x
    lo, hi = 0.0, 1.0
    best_val = None
    best = adv
    for _ in range(b):
        mid = 0.5 * (lo + hi)
        point = x + mid * direction
        if clip:
            np.clip(point, -1.0, 1.0, out=point)
        val = objective.evaluate(point)
        if val.adversarial:
            hi = mid
            best, best_val = point, val
        else:
            lo = mid
    return best, best_val


def binary_search_to_boundary(objective: AttackObjective, original, adversarial, b: int = 15,
                              verify: bool = False):
    """Project ``adversarial`` toward the decision boundary with ``b`` queries.

    The returned point lies on the segment between the two inputs, is still
    adversarial, and is within ``|adversarial - original| / 2**b`` of a
    boundary crossing. With ``verify=True`` two extra queries check the
    precondition first and :class:`InvalidStart` is raised on violation.
    Returns an :class:`AudioVector` when ``adversarial`` is one, else an array.
    """
    if verify:
        check_start(objective, original, adversarial)
    point, _ = bisect_segment(objective, original, adversarial, b, clip=isinstance(adversarial, AudioVector))
    if isinstance(adversarial, AudioVector):
        return adversarial.with_samples(point)
    return point
