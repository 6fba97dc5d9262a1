"""Decision oracles: the black box ``f`` that maps audio to a discrete label.

Every call to :meth:`DecisionOracle.query` goes through a :class:`QueryLedger`
so attacks can report exactly how many decisions they consumed.
"""
from __future__ import annotations

import json
import logging
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, HTTPServer
from typing import Mapping, Optional

import numpy as np

from .audio import AudioVector, audio_from_wav_bytes, wav_bytes
from .errors import BudgetExhausted, DimensionError, TransportError, ValidationError, WavFormatError

log = logging.getLogger(__name__)

TARGET = "target"
BENIGN = "benign"


@dataclass
class QueryLedger:
    count: int = 0
    budget: Optional[int] = None

    @property
    def remaining(self) -> Optional[int]:
        return None if self.budget is None else self.budget - self.count

    @property
    def exhausted(self) -> bool:
        return self.budget is not None and self.count >= self.budget

    def check(self):
        if self.exhausted:
            raise BudgetExhausted(f"query budget of {self.budget} exhausted")

    def charge(self):
        self.check()
        self.count += 1


class DecisionOracle:
    """Base class. Subclasses implement ``_decide(samples) -> str``."""

    sample_rate = 16000

    def __init__(self, budget: Optional[int] = None):
        self.ledger = QueryLedger(budget=budget)

    def query(self, candidate) -> str:
        if isinstance(candidate, AudioVector):
            samples = candidate.samples
        else:
            samples = np.asarray(candidate, dtype=np.float64)
        self.ledger.check()
        label = self._decide(samples)
        self.ledger.charge()
        return label

    __call__ = query

    def _decide(self, samples: np.ndarray) -> str:
        raise NotImplementedError


def _check_dim(samples, dim):
    if samples.shape[0] != dim:
        raise DimensionError(f"oracle expects length {dim}, got {samples.shape[0]}")


class HalfspaceOracle(DecisionOracle):
    """``"target"`` iff ``w . x + offset > 0``."""

    def __init__(self, weights, offset: float = 0.0, budget=None):
        super().__init__(budget)
        w = np.asarray(weights, dtype=np.float64).reshape(-1)
        if w.size == 0 or not np.any(w) or not np.all(np.isfinite(w)):
            raise ValidationError("halfspace weight vector must be finite and non-zero")
        self.weights = w
        self.offset = float(offset)

    def _decide(self, samples):
        _check_dim(samples, self.weights.shape[0])
        return TARGET if float(np.dot(self.weights, samples)) + self.offset > 0 else BENIGN


class BallOracle(DecisionOracle):
    """``"target"`` iff the input lies in the closed L2 ball around ``center``."""

    def __init__(self, center, radius: float, budget=None):
        super().__init__(budget)
        c = np.asarray(center, dtype=np.float64).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValidationError("ball center must be a finite non-empty vector")
        if not np.isfinite(radius) or radius < 0:
            raise ValidationError("ball radius must be >= 0")
        self.center = c
        self.radius = float(radius)

    def _decide(self, samples):
        _check_dim(samples, self.center.shape[0])
        d = samples - self.center
        return TARGET if float(np.dot(d, d)) <= self.radius * self.radius else BENIGN


class TemplateOracle(DecisionOracle):
    """Nearest-centroid classifier; ties go to the lexicographically smallest label."""

    def __init__(self, centroids: Mapping[str, object], budget=None):
        super().__init__(budget)
        if not centroids:
            raise ValidationError("template oracle needs at least one centroid")
        self.labels = sorted(centroids)
        if any(not lab for lab in self.labels):
            raise ValidationError("centroid labels must be non-empty")
        mat = np.array([np.asarray(centroids[k], dtype=np.float64).reshape(-1) for k in self.labels])
        if mat.ndim != 2 or not np.all(np.isfinite(mat)):
            raise ValidationError("centroids must be finite vectors of equal length")
        self.centroids = mat

    def _decide(self, samples):
        _check_dim(samples, self.centroids.shape[1])
        d2 = np.sum((self.centroids - samples) ** 2, axis=1)
        # argmin returns the first minimum, and labels are sorted
        return self.labels[int(np.argmin(d2))]


_PUNCT = re.compile(r"[^\w\s]")


def normalize_transcript(text: str) -> str:
    return " ".join(_PUNCT.sub("", text.lower()).split())


class RemoteOracle(DecisionOracle):
    """HTTP decision client.

    Each query POSTs the candidate as a 16-bit WAV body and expects a JSON
    object carrying the label under ``label_field``. Transport failures are
    retried up to ``retries`` times and never consume budget.
    """

    def __init__(self, url: str, label_field: str = "decision", *, token: Optional[str] = None,
                 normalize: bool = False, retries: int = 3, timeout: float = 30.0,
                 backoff: float = 0.0, sample_rate: int = 16000, budget=None):
        super().__init__(budget)
        if not url:
            raise ValidationError("remote oracle needs a URL")
        self.url = url
        self.label_field = label_field
        self.token = token
        self.normalize = normalize
        self.retries = int(retries)
        self.timeout = timeout
        self.backoff = backoff
        self.sample_rate = sample_rate

    def _request(self, body: bytes) -> str:
        headers = {"Content-Type": "audio/wav"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        req = urllib.request.Request(self.url, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            exc.close()
            raise TransportError(f"HTTP {exc.code} from {self.url}") from None
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise TransportError(f"request to {self.url} failed: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get(self.label_field), str):
            raise TransportError(f"response lacks string field {self.label_field!r}")
        return payload[self.label_field]

    def _decide(self, samples):
        body = wav_bytes(AudioVector(np.clip(samples, -1.0, 1.0), self.sample_rate))
        last = None
        for attempt in range(self.retries + 1):
            try:
                label = self._request(body)
                break
            except TransportError as exc:
                last = exc
                log.info("remote oracle attempt %d failed: %s", attempt + 1, exc)
                if self.backoff:
                    time.sleep(self.backoff * (2 ** attempt))
        else:
            raise last
        return normalize_transcript(label) if self.normalize else label


@dataclass
class OracleSpec:
    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: Mapping) -> "OracleSpec":
        d = dict(d)
        if "kind" not in d:
            raise ValidationError("oracle spec needs a 'kind'")
        kind = d.pop("kind")
        return cls(kind, d)


def _vector_param(params, key):
    if key in params:
        return np.asarray(params[key], dtype=np.float64)
    path_key = key + "_path"
    if path_key in params:
        from .audio import read_wav

        return read_wav(params[path_key]).samples
    raise ValidationError(f"oracle spec missing {key!r} (or {path_key!r})")


def build_oracle(spec) -> DecisionOracle:
    """Instantiate an oracle from an :class:`OracleSpec` or a plain dict."""
    if not isinstance(spec, OracleSpec):
        spec = OracleSpec.from_dict(spec)
    p = spec.params
    budget = p.get("budget")
    try:
        if spec.kind == "halfspace":
            return HalfspaceOracle(_vector_param(p, "weights"), p.get("offset", 0.0), budget=budget)
        if spec.kind == "ball":
            if "radius" not in p:
                raise ValidationError("ball oracle needs 'radius'")
            return BallOracle(_vector_param(p, "center"), float(p["radius"]), budget=budget)
        if spec.kind == "template":
            cents = p.get("centroids")
            if not isinstance(cents, Mapping):
                raise ValidationError("template oracle needs a 'centroids' mapping")
            return TemplateOracle(cents, budget=budget)
        if spec.kind == "remote":
            return RemoteOracle(
                p.get("url", ""),
                p.get("label_field", "decision"),
                token=p.get("token"),
                normalize=bool(p.get("normalize", False)),
                retries=int(p.get("retries", 3)),
                timeout=float(p.get("timeout", 30.0)),
                sample_rate=int(p.get("sample_rate", 16000)),
                budget=budget,
            )
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"malformed {spec.kind} oracle spec: {exc}") from exc
    raise ValidationError(f"unknown oracle kind {spec.kind!r}")


def make_mock_server(oracle: DecisionOracle, host: str = "127.0.0.1", port: int = 0,
                     fail_first: int = 0) -> HTTPServer:
    """HTTP server answering the remote decision protocol with ``oracle``.

    ``fail_first`` makes the first N requests answer 503, for exercising
    client retries. Requests are handled sequentially.
    """
    state = {"failures_left": int(fail_first)}

    class Handler(BaseHTTPRequestHandler):
        def _reply(self, code, obj):
            body = json.dumps(obj).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            data = self.rfile.read(length)
            if state["failures_left"] > 0:
                state["failures_left"] -= 1
                self._reply(503, {"error": "unavailable"})
                return
            if self.headers.get("Content-Type", "") != "audio/wav":
                self._reply(415, {"error": "expected audio/wav"})
                return
            try:
                audio = audio_from_wav_bytes(data)
                label = oracle.query(audio)
            except (WavFormatError, ValidationError) as exc:
                self._reply(400, {"error": str(exc)})
                return
            except BudgetExhausted as exc:
                self._reply(429, {"error": str(exc)})
                return
            self._reply(200, {"decision": label})

        def log_message(self, fmt, *args):
            log.debug("mock oracle: " + fmt, *args)

    return HTTPServer((host, port), Handler)
