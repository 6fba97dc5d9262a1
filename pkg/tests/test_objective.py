import math

import numpy as np
import pytest

from occam import AttackObjective, AudioVector, BallOracle, TargetSpec, TemplateOracle
from occam.errors import BudgetExhausted, DimensionError, ValidationError
from occam.objective import NOT_ADVERSARIAL, ObjectiveValue


@pytest.fixture
def ball_obj():
    return AttackObjective(BallOracle([10.0, 0.0], 2.0), AudioVector([0.0, 0.0]), TargetSpec.targeted("target"))


def test_inside_ball_gives_distance(ball_obj):
    v = ball_obj.evaluate(np.array([9.0, 0.0]))
    assert v.adversarial and v.value == 9.0


def test_outside_ball_is_infinite(ball_obj):
    v = ball_obj.evaluate(np.array([5.0, 0.0]))
    assert not v.adversarial and math.isinf(v.value)


def test_original_satisfying_predicate_is_zero():
    obj = AttackObjective(BallOracle([0.0, 0.0], 1.0), AudioVector([0.0, 0.0]), TargetSpec.targeted("target"))
    assert obj.evaluate(AudioVector([0.0, 0.0])) == ObjectiveValue(0.0, True)


def test_one_query_per_call(ball_obj):
    for k, c in enumerate(([9.0, 0.0], [5.0, 0.0], [9.0, 0.0]), 1):
        ball_obj.evaluate(np.array(c))
        assert ball_obj.queries == k


def test_budget_propagates():
    obj = AttackObjective(BallOracle([0.0], 1.0, budget=1), AudioVector([0.0]), TargetSpec.targeted("target"))
    obj.evaluate([0.0])
    with pytest.raises(BudgetExhausted):
        obj.evaluate([0.0])


def test_length_mismatch(ball_obj):
    with pytest.raises(DimensionError):
        ball_obj.evaluate(np.zeros(3))
    assert ball_obj.queries == 0


def test_untargeted_original_is_infinite():
    oracle = TemplateOracle({"hello": [0.0, 0.0], "bye": [0.8, 0.8]})
    x = AudioVector([0.1, 0.0])
    obj = AttackObjective(oracle, x, TargetSpec.untargeted(oracle.query(x)))
    assert obj.evaluate(x) is NOT_ADVERSARIAL
    v = obj.evaluate(AudioVector([0.7, 0.7]))
    assert v.adversarial and v.value == pytest.approx(math.hypot(0.6, 0.7))


def test_finite_value_is_pure(ball_obj):
    c = np.array([9.5, 0.5])
    first = ball_obj.evaluate(c)
    assert first.adversarial
    assert all(ball_obj.evaluate(c) == first for _ in range(5))


class TestTargetSpec:
    def test_requires_label(self):
        with pytest.raises(ValidationError):
            TargetSpec("targeted")
        with pytest.raises(ValidationError):
            TargetSpec("untargeted", original_label="")
        with pytest.raises(ValidationError):
            TargetSpec("sideways", target_label="x")

    def test_predicates(self):
        assert TargetSpec.targeted("a").is_success("a")
        assert not TargetSpec.targeted("a").is_success("b")
        assert TargetSpec.untargeted("a").is_success("b")
        assert not TargetSpec.untargeted("a").is_success("a")


def test_better_than():
    a, b = ObjectiveValue(1.0, True), ObjectiveValue(2.0, True)
    assert a.better_than(b) and not b.better_than(a)
    assert a.better_than(NOT_ADVERSARIAL)
    assert not NOT_ADVERSARIAL.better_than(NOT_ADVERSARIAL)
    assert not a.better_than(a)
