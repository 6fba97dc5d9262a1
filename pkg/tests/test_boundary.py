import numpy as np
import pytest

from occam import AttackObjective, AudioVector, BallOracle, TargetSpec
from occam.boundary import binary_search_to_boundary, bisect_segment, check_start
from occam.errors import InvalidStart, ValidationError

from helpers import ball_objective, ball_problem


def _ball_obj():
    return AttackObjective(BallOracle([10.0, 0.0], 2.0), AudioVector([0.0, 0.0]), TargetSpec.targeted("target"))


def test_crossing_at_distance_eight():
    obj = _ball_obj()
    p = binary_search_to_boundary(obj, np.zeros(2), np.array([10.0, 0.0]), b=15)
    assert obj.queries == 15
    assert abs(p[0] - 8.0) <= 10 / 2 ** 15 and p[1] == 0.0
    assert p[0] >= 8.0
    assert obj.oracle.query(p) == "target"


def test_single_step_returns_midpoint():
    obj = AttackObjective(BallOracle([0.5], 0.3), AudioVector([0.0]), TargetSpec.targeted("target"))
    p = binary_search_to_boundary(obj, np.zeros(1), np.array([0.6]), b=1)
    assert p.tolist() == [0.3]
    assert obj.queries == 1


def test_no_adversarial_midpoint_keeps_endpoint():
    obj = AttackObjective(BallOracle([0.9], 0.05), AudioVector([0.0]), TargetSpec.targeted("target"))
    point, val = bisect_segment(obj, np.zeros(1), np.array([0.9]), b=3)
    assert point.tolist() == [0.9] and val is None


def test_audio_vector_in_audio_vector_out():
    x, t, r, start, _ = ball_problem(50, 0)
    obj = ball_objective(x, t, r)
    out = binary_search_to_boundary(obj, AudioVector(x), AudioVector(start))
    assert isinstance(out, AudioVector)
    assert obj.evaluate(out).adversarial


@pytest.mark.parametrize("seed", range(5))
def test_result_adversarial_and_not_farther(seed):
    x, t, r, start, _ = ball_problem(200, seed)
    obj = ball_objective(x, t, r)
    before = np.linalg.norm(start - x)
    out = binary_search_to_boundary(obj, AudioVector(x), AudioVector(start))
    after = obj.evaluate(out)
    assert after.adversarial and after.value <= before
    assert obj.queries == 15 + 1


def test_verify_rejects_bad_start():
    obj = _ball_obj()
    with pytest.raises(InvalidStart):
        binary_search_to_boundary(obj, np.zeros(2), np.array([5.0, 0.0]), verify=True)
    obj = AttackObjective(BallOracle([0.0, 0.0], 1.0), AudioVector([0.0, 0.0]), TargetSpec.targeted("target"))
    with pytest.raises(InvalidStart):
        binary_search_to_boundary(obj, np.zeros(2), np.array([0.5, 0.0]), verify=True)


def test_check_start_returns_value():
    obj = _ball_obj()
    v = check_start(obj, np.zeros(2), np.array([9.0, 0.0]))
    assert v.value == 9.0 and obj.queries == 2


def test_b_must_be_positive():
    with pytest.raises(ValidationError):
        binary_search_to_boundary(_ball_obj(), np.zeros(2), np.array([10.0, 0.0]), b=0)
