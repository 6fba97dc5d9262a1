"""Non-interactive attack by gradient inversion of a substitute model.

The command is embedded into a carrier audio by minimizing the substitute's
loss at noisy copies of the current iterate, with AdaBelief steps, an L-inf
budget around the carrier, and annealed Gaussian noise. No oracle is touched.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence

import numpy as np

from .audio import AudioVector
from .errors import ValidationError


class DifferentiableModel(Protocol):
    def loss(self, candidate: np.ndarray, target: Sequence[int]) -> float: ...

    def gradient(self, candidate: np.ndarray, target: Sequence[int]) -> np.ndarray: ...


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


@dataclass
class ToySubstituteModel:
    """Per-frame linear softmax classifier standing in for an acoustic model.

    The audio is cut into non-overlapping frames of ``frame_length`` samples;
    each frame gets logits ``W @ frame + bias`` over ``K`` classes.
    """

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValidationError("weights must be (K, frame_length) and bias (K,)")

    @classmethod
    def random(cls, seed: int = 0, frame_length: int = 160, classes: int = 4, scale: float = 1.0):
        rng = np.random.default_rng(seed)
        w = rng.standard_normal((classes, frame_length)) * scale
        return cls(w, rng.standard_normal(classes) * 0.1)

    @property
    def frame_length(self) -> int:
        return self.weights.shape[1]

    @property
    def classes(self) -> int:
        return self.weights.shape[0]

    def _frames(self, candidate, target=None):
        arr = np.asarray(candidate.samples if isinstance(candidate, AudioVector) else candidate, dtype=np.float64)
        L = self.frame_length
        if arr.shape[0] % L:
            raise ValidationError(f"audio length {arr.shape[0]} is not a multiple of frame length {L}")
        frames = arr.reshape(-1, L)
        if target is not None:
            target = np.asarray(target, dtype=np.intp)
            if target.shape != (frames.shape[0],):
                raise ValidationError(f"target has {target.shape[0]} labels for {frames.shape[0]} frames")
            if target.min() < 0 or target.max() >= self.classes:
                raise ValidationError("target class out of range")
        return frames, target

    def predict(self, candidate) -> np.ndarray:
        frames, _ = self._frames(candidate)
        return np.argmax(frames @ self.weights.T + self.bias, axis=1)

    def loss_and_grad(self, candidate, target):
        frames, target = self._frames(candidate, target)
        F = frames.shape[0]
        logp = _log_softmax(frames @ self.weights.T + self.bias)
        rows = np.arange(F)
        loss = -logp[rows, target].mean()
        delta = np.exp(logp)
        delta[rows, target] -= 1.0
        grad = (delta @ self.weights) / F
        return float(loss), grad.reshape(-1)

    def loss(self, candidate, target) -> float:
        return self.loss_and_grad(candidate, target)[0]

    def gradient(self, candidate, target) -> np.ndarray:
        return self.loss_and_grad(candidate, target)[1]


@dataclass
class AdaBeliefState:
    m: np.ndarray
    s: np.ndarray
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0

    @classmethod
    def zeros(cls, dim: int, **kw) -> "AdaBeliefState":
        return cls(np.zeros(dim), np.zeros(dim), **kw)


def adabelief_step(state: AdaBeliefState, params, gradient, alpha: float) -> np.ndarray:
    """One bias-corrected AdaBelief update; returns the new parameters."""
    g = np.asarray(gradient, dtype=np.float64)
    p = np.asarray(params, dtype=np.float64)
    if g.shape != p.shape or g.shape != state.m.shape:
        raise ValidationError("parameter, gradient and state shapes differ")
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * g
    state.s = state.beta2 * state.s + (1.0 - state.beta2) * (g - state.m) ** 2
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    s_hat = state.s / (1.0 - state.beta2 ** state.t)
    return p - alpha * m_hat / (np.sqrt(s_hat) + state.eps)


@dataclass(frozen=True)
class InversionConfig:
    learning_rate: float = 0.003
    noise_std: float = 0.25
    noise_decay: float = 0.998
    epsilon: float = 0.3
    iterations: int = 2000
    seed: int = 0
    # stop early when the loss improves by less than plateau_tol (relative)
    # over plateau_window iterations; None disables
    plateau_window: Optional[int] = None
    plateau_tol: float = 1e-5
    keep_iterates: bool = True

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValidationError("epsilon must be >= 0")
        if not 0 < self.noise_decay <= 1:
            raise ValidationError("noise_decay must be in (0, 1]")
        if self.iterations < 0 or self.noise_std < 0 or self.learning_rate <= 0:
            raise ValidationError("iterations and noise_std must be >= 0, learning_rate > 0")


@dataclass
class InversionResult:
    original: AudioVector
    iterates: List[np.ndarray]
    losses: List[float]
    linf: List[float]
    sigmas: List[float]
    best_index: int
    best: AudioVector
    initial_loss: float
    seed: int = 0
    queries: int = field(default=0)

    @property
    def best_loss(self) -> float:
        return self.losses[self.best_index] if self.losses else self.initial_loss


def run_ni_occam(config: InversionConfig, model: DifferentiableModel, original, target) -> InversionResult:
    """Iterate noisy-gradient AdaBelief steps and collect every clipped iterate.

    The reported ``best`` is the iterate with the lowest noise-free loss.
    """
    audio = original if isinstance(original, AudioVector) else AudioVector(original)
    x = audio.samples
    lo = np.maximum(x - config.epsilon, -1.0)
    hi = np.minimum(x + config.epsilon, 1.0)
    rng = np.random.default_rng(config.seed)
    opt = AdaBeliefState.zeros(x.shape[0])
    xs = x.copy()
    initial_loss = float(model.loss(xs, target))
    iterates, losses, linf, sigmas = [], [], [], []
    best_i, best_loss, best = -1, initial_loss, x.copy()

    for k in range(config.iterations):
        sigma = config.noise_std * config.noise_decay ** k
        z = rng.normal(0.0, 1.0, x.shape[0]) * sigma
        g = model.gradient(xs + z, target)
        xs = np.clip(adabelief_step(opt, xs, g, config.learning_rate), lo, hi)
        loss = float(model.loss(xs, target))
        losses.append(loss)
        linf.append(float(np.max(np.abs(xs - x))))
        sigmas.append(sigma)
        if config.keep_iterates:
            iterates.append(xs.copy())
        if loss < best_loss:
            best_i, best_loss, best = k, loss, xs.copy()
        w = config.plateau_window
        if w and k >= w:
            prev = losses[k - w]
            if prev > 0 and (prev - loss) / prev < config.plateau_tol:
                break

    return InversionResult(
        original=audio,
        iterates=iterates,
        losses=losses,
        linf=linf,
        sigmas=sigmas,
        best_index=best_i,
        best=audio.with_samples(best),
        initial_loss=initial_loss,
        seed=config.seed,
    )


def read_target_sequence(path) -> List[int]:
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: expected an integer class, got {line!r}") from exc
    if not labels:
        raise ValidationError(f"{path}: empty target sequence")
    return labels


def write_target_sequence(labels, path) -> None:
    with open(path, "w") as fh:
        for lab in labels:
            fh.write(f"{int(lab)}\n")
