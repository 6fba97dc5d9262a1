"""Decision-only attack objective: distance to the original if adversarial, else +inf."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .audio import AudioVector
from .errors import DimensionError, ValidationError
from .oracle import DecisionOracle


@dataclass(frozen=True)
class TargetSpec:
    mode: str
    target_label: Optional[str] = None
    original_label: Optional[str] = None

    def __post_init__(self):
        if self.mode == "targeted":
            if not self.target_label:
                raise ValidationError("targeted mode needs a non-empty target_label")
        elif self.mode == "untargeted":
            if not self.original_label:
                raise ValidationError("untargeted mode needs a non-empty original_label")
        else:
            raise ValidationError(f"unknown target mode {self.mode!r}")

    @classmethod
    def targeted(cls, label: str) -> "TargetSpec":
        return cls("targeted", target_label=label)

    @classmethod
    def untargeted(cls, original_label: str) -> "TargetSpec":
        return cls("untargeted", original_label=original_label)

    def is_success(self, label: str) -> bool:
        if self.mode == "targeted":
            return label == self.target_label
        return label != self.original_label


@dataclass(frozen=True)
class ObjectiveValue:
    """Objective value with an explicit adversarial flag.

    ``value`` is ``math.inf`` exactly when ``adversarial`` is False; code paths
    should branch on the flag rather than do arithmetic with the infinity.
    """

    value: float
    adversarial: bool

    def better_than(self, other: "ObjectiveValue") -> bool:
        if not self.adversarial:
            return False
        return not other.adversarial or self.value < other.value


NOT_ADVERSARIAL = ObjectiveValue(float("inf"), False)


class AttackObjective:
    """Binds an oracle, the original audio and a target spec."""

    def __init__(self, oracle: DecisionOracle, original, target: TargetSpec):
        self.oracle = oracle
        self.original = original if isinstance(original, AudioVector) else AudioVector(original)
        self._x = self.original.samples
        self.target = target

    @property
    def queries(self) -> int:
        return self.oracle.ledger.count

    def evaluate(self, candidate) -> ObjectiveValue:
        arr = candidate.samples if isinstance(candidate, AudioVector) else np.asarray(candidate, dtype=np.float64)
        if arr.shape != self._x.shape:
            raise DimensionError(f"candidate length {arr.shape[0]} != original length {self._x.shape[0]}")
        label = self.oracle.query(arr)
        if not self.target.is_success(label):
            return NOT_ADVERSARIAL
        d = arr - self._x
        return ObjectiveValue(float(np.sqrt(np.dot(d, d))), True)

    __call__ = evaluate
