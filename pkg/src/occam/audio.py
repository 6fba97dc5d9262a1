"""Audio container, WAV I/O, distance metrics and input-transformation defenses."""
from __future__ import annotations

import io
import wave
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionError, WavFormatError, UndefinedSNRError, ValidationError

PCM_SCALE = 32768.0


@dataclass(frozen=True, eq=False)
class AudioVector:
    """Mono waveform with amplitudes in [-1, 1].

    The sample buffer is copied on construction and marked read-only, so
    instances can be shared freely.
    """

    samples: np.ndarray
    sample_rate: int = 16000

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise ValidationError("audio must contain at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("audio samples must be finite")
        if np.any(np.abs(arr) > 1.0):
            raise ValidationError("audio samples must lie in [-1, 1]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValidationError(f"invalid sample rate {self.sample_rate!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    def with_samples(self, samples) -> "AudioVector":
        return AudioVector(samples, self.sample_rate)

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def _as_array(a) -> np.ndarray:
    if isinstance(a, AudioVector):
        return a.samples
    return np.asarray(a, dtype=np.float64).reshape(-1)


def read_wav(path) -> AudioVector:
    """Read a mono 16-bit PCM WAV file (path or binary file object)."""
    if hasattr(path, "read"):
        return _read_wav_fh(path, "<stream>")
    with open(path, "rb") as fh:
        return _read_wav_fh(fh, path)


def _read_wav_fh(fh, path) -> AudioVector:
    try:
        with wave.open(fh, "rb") as wf:
            if wf.getnchannels() != 1:
                raise WavFormatError(f"{path}: expected mono, got {wf.getnchannels()} channels")
            if wf.getsampwidth() != 2:
                raise WavFormatError(f"{path}: expected 16-bit samples, got {8 * wf.getsampwidth()}-bit")
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"{path}: {exc}") from exc
    ints = np.frombuffer(raw, dtype="<i2")
    return AudioVector(ints.astype(np.float64) / PCM_SCALE, rate)


def to_pcm16(samples) -> np.ndarray:
    ints = np.clip(np.round(_as_array(samples) * PCM_SCALE), -32768, 32767)
    return ints.astype("<i2")


def _write_wav_fh(audio: AudioVector, fh) -> None:
    with wave.open(fh, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(audio.sample_rate)
        wf.writeframes(to_pcm16(audio).tobytes())


def write_wav(audio: AudioVector, path) -> None:
    with open(path, "wb") as fh:
        _write_wav_fh(audio, fh)


def wav_bytes(audio: AudioVector) -> bytes:
    buf = io.BytesIO()
    _write_wav_fh(audio, buf)
    return buf.getvalue()


def audio_from_wav_bytes(data: bytes) -> AudioVector:
    return read_wav(io.BytesIO(data))


def l2_distance(a, b) -> float:
    xa, xb = _as_array(a), _as_array(b)
    if xa.shape != xb.shape:
        raise DimensionError(f"length mismatch: {xa.shape[0]} vs {xb.shape[0]}")
    d = xa - xb
    return float(np.sqrt(np.dot(d, d)))


def snr_db(original, perturbed) -> float:
    """Signal-to-noise ratio of a perturbation, in decibels."""
    x, xp = _as_array(original), _as_array(perturbed)
    if x.shape != xp.shape:
        raise DimensionError(f"length mismatch: {x.shape[0]} vs {xp.shape[0]}")
    signal = float(np.dot(x, x))
    noise = float(np.dot(xp - x, xp - x))
    if noise == 0.0:
        raise UndefinedSNRError("perturbation has zero power")
    if signal == 0.0:
        raise UndefinedSNRError("original signal has zero power")
    return 10.0 * np.log10(signal / noise)


def local_smooth(audio, h: int, method: str = "mean"):
    """Sliding-window smoothing over ``2h + 1`` samples with edge replication.

    ``method`` is ``"mean"`` (default) or ``"median"``. An :class:`AudioVector`
    input yields an :class:`AudioVector`; a raw array yields an unclipped array.
    """
    if h < 0:
        raise ValidationError("window half-width must be >= 0")
    x = _as_array(audio)
    if h == 0:
        return audio if isinstance(audio, AudioVector) else x.copy()
    padded = np.pad(x, h, mode="edge")
    windows = sliding_window_view(padded, 2 * h + 1)
    if method == "mean":
        # averaging offsets from the centre keeps constant stretches exact
        out = x + (windows - x[:, None]).mean(axis=1)
    elif method == "median":
        out = np.median(windows, axis=1)
    else:
        raise ValidationError(f"unknown smoothing method {method!r}")
    if not isinstance(audio, AudioVector):
        return out
    # mean of in-range values can round a hair past +-1
    return audio.with_samples(np.clip(out, -1.0, 1.0))


def resample(audio, new_rate: int, sample_rate: int = None):
    """Linear-interpolation resampling onto a grid spanning the same duration.

    Raw arrays need ``sample_rate`` and come back as arrays.
    """
    if new_rate < 1:
        raise ValidationError("new_rate must be >= 1")
    is_audio = isinstance(audio, AudioVector)
    x = _as_array(audio)
    rate = audio.sample_rate if is_audio else sample_rate
    if rate is None or rate < 1:
        raise ValidationError("a positive sample_rate is required for raw arrays")
    if new_rate == rate:
        return audio if is_audio else x.copy()
    n = x.shape[0]
    new_n = max(1, int(round(n * new_rate / rate)))
    if n == 1:
        out = np.full(new_n, x[0])
    elif new_n == 1:
        out = x[:1].copy()
    else:
        positions = np.linspace(0.0, n - 1, new_n)
        out = np.interp(positions, np.arange(n), x)
    if not is_audio:
        return out
    return AudioVector(np.clip(out, -1.0, 1.0), new_rate)
