"""Command-line experiment runner.

    occam attack <config.json>
    occam mock-oracle serve --port <p> --spec <spec.json>
    occam metrics <orig.wav> <adv.wav>
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .audio import AudioVector, l2_distance, read_wav, snr_db, write_wav
from .baselines import DeaConfig, run_dea, run_evolutionary
from .driver import AttackConfig, AttackResult, run_occam
from .errors import (BudgetExhausted, DimensionError, InvalidStart, OccamError, TransportError,
                     UndefinedSNRError, ValidationError, WavFormatError)
from .inversion import (InversionConfig, InversionResult, ToySubstituteModel, read_target_sequence,
                        run_ni_occam)
from .objective import AttackObjective, TargetSpec
from .oracle import build_oracle, make_mock_server

log = logging.getLogger("occam")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_NO_ADVERSARIAL = 3

ATTACKS = ("occam", "evolutionary", "dea", "ni-occam")
TRACE_COLUMNS = ("queries", "best_distance", "m", "strategy", "sigma")


@dataclass
class ExperimentConfig:
    attack: str
    original: Path
    output_dir: Path
    seed: int = 0
    budget: Optional[int] = None
    oracle: Optional[dict] = None
    target: Optional[dict] = None
    initial_adversarial: Optional[Path] = None
    model: Optional[dict] = None
    target_sequence: Optional[Path] = None
    command_audio: Optional[Path] = None
    params: Optional[dict] = None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValidationError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        base = path.parent

        def resolve(key):
            v = raw.get(key)
            if v is None:
                return None
            p = Path(v)
            return p if p.is_absolute() else base / p

        for key in ("attack", "original", "output_dir"):
            if key not in raw:
                raise ValidationError(f"config missing required key {key!r}")
        cfg = cls(
            attack=raw["attack"],
            original=resolve("original"),
            output_dir=resolve("output_dir"),
            seed=int(raw.get("seed", 0)),
            budget=raw.get("budget"),
            oracle=raw.get("oracle"),
            target=raw.get("target"),
            initial_adversarial=resolve("initial_adversarial"),
            model=raw.get("model"),
            target_sequence=resolve("target_sequence"),
            command_audio=resolve("command_audio"),
            params=raw.get("params") or {},
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.attack not in ATTACKS:
            raise ValidationError(f"attack must be one of {ATTACKS}, got {self.attack!r}")
        if not self.original.is_file():
            raise ValidationError(f"original audio {self.original} does not exist")
        if self.attack == "ni-occam":
            if self.target_sequence is None and self.command_audio is None:
                raise ValidationError("ni-occam needs 'target_sequence' or 'command_audio'")
            for p in (self.target_sequence, self.command_audio):
                if p is not None and not p.is_file():
                    raise ValidationError(f"{p} does not exist")
            return
        if self.oracle is None:
            raise ValidationError(f"{self.attack} needs an 'oracle' spec")
        if self.target is None:
            raise ValidationError(f"{self.attack} needs a 'target' spec")
        if self.initial_adversarial is None:
            raise ValidationError(f"{self.attack} needs 'initial_adversarial'")
        if not self.initial_adversarial.is_file():
            raise ValidationError(f"initial adversarial audio {self.initial_adversarial} does not exist")
        if self.attack != "dea" and self.budget is None:
            raise ValidationError(f"{self.attack} needs a query 'budget'")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_report(result: AttackResult, out_dir) -> dict:
    """Write result.json, trace.csv, adversarial.wav and original.wav into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dists = [row.best_distance for row in result.trace]
    if any(b > a for a, b in zip(dists, dists[1:])):
        raise ValidationError("trace best_distance is not non-increasing")
    with open(out / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in result.trace:
            w.writerow([_fmt(getattr(row, c)) for c in TRACE_COLUMNS])
    write_wav(result.original, out / "original.wav")
    if result.adversarial is not None:
        write_wav(result.adversarial, out / "adversarial.wav")
    summary = {
        "attack": result.attack,
        "seed": result.seed,
        "queries": result.queries,
        "sampled": result.sampled,
        "final_distance": result.final_distance if result.success else None,
        "snr_db": result.snr_db,
        "success": result.success,
    }
    (out / "result.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


def write_inversion_report(result: InversionResult, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("iteration", "loss", "linf", "sigma"))
        for k, (loss, linf, sigma) in enumerate(zip(result.losses, result.linf, result.sigmas)):
            w.writerow((k, repr(loss), repr(linf), repr(sigma)))
    write_wav(result.original, out / "original.wav")
    write_wav(result.best, out / "adversarial.wav")
    try:
        snr = snr_db(result.original, result.best)
    except UndefinedSNRError:
        snr = None
    summary = {
        "attack": "ni-occam",
        "seed": result.seed,
        "queries": 0,
        "final_distance": l2_distance(result.original, result.best),
        "snr_db": snr,
        "success": True,
        "initial_loss": result.initial_loss,
        "final_loss": result.best_loss,
        "best_iteration": result.best_index,
        "iterations": len(result.losses),
    }
    (out / "result.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


def _build_model(spec: Optional[dict]):
    spec = dict(spec or {"kind": "toy"})
    kind = spec.pop("kind", "toy")
    if kind != "toy":
        raise ValidationError(f"unsupported model kind {kind!r}")
    try:
        return ToySubstituteModel.random(**spec)
    except TypeError as exc:
        raise ValidationError(f"bad toy model parameters: {exc}") from exc


def _pick(params: dict, cls) -> dict:
    # seed and budget come from the top-level config keys
    names = {f.name for f in fields(cls)} - {"seed", "total_queries"}
    unknown = set(params) - names
    if unknown:
        raise ValidationError(f"unknown params for {cls.__name__}: {sorted(unknown)}")
    return dict(params)


def run_experiment(config_path) -> int:
    cfg = ExperimentConfig.load(config_path)
    original = read_wav(cfg.original)

    if cfg.attack == "ni-occam":
        model = _build_model(cfg.model)
        if cfg.target_sequence is not None:
            target = read_target_sequence(cfg.target_sequence)
        else:
            target = model.predict(read_wav(cfg.command_audio)).tolist()
        inv_cfg = InversionConfig(seed=cfg.seed, keep_iterates=False, **_pick(cfg.params, InversionConfig))
        result = run_ni_occam(inv_cfg, model, original, target)
        summary = write_inversion_report(result, cfg.output_dir)
        log.info("ni-occam done: %s", summary)
        return EXIT_OK

    oracle = build_oracle(cfg.oracle)
    try:
        target = TargetSpec(**cfg.target)
    except TypeError as exc:
        raise ValidationError(f"bad target spec: {exc}") from exc
    objective = AttackObjective(oracle, original, target)
    start = read_wav(cfg.initial_adversarial)
    if len(start) != len(original):
        raise ValidationError("initial adversarial and original audio lengths differ")

    if cfg.attack == "dea":
        params = _pick(cfg.params, DeaConfig)
        params.setdefault("total_queries", cfg.budget)
        result = run_dea(DeaConfig(seed=cfg.seed, **params), objective, original, start)
    else:
        att = AttackConfig(total_queries=int(cfg.budget), seed=cfg.seed, **_pick(cfg.params, AttackConfig))
        runner = run_occam if cfg.attack == "occam" else run_evolutionary
        result = runner(att, objective, original, start)

    summary = write_report(result, cfg.output_dir)
    log.info("%s done: %s", cfg.attack, summary)
    return EXIT_OK if result.success else EXIT_NO_ADVERSARIAL


def _fail(code: str, exc: Exception, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": str(exc)}) + "\n")
    return status


def _cmd_attack(args) -> int:
    try:
        return run_experiment(args.config)
    except (ValidationError, InvalidStart, WavFormatError, DimensionError) as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    except BudgetExhausted as exc:
        return _fail("budget_exhausted", exc, EXIT_NO_ADVERSARIAL)
    except TransportError as exc:
        return _fail("transport", exc, EXIT_ERROR)
    except (OccamError, OSError) as exc:
        return _fail("error", exc, EXIT_ERROR)


def _cmd_serve(args) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        oracle = build_oracle(spec)
    except (OSError, ValueError) as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    server = make_mock_server(oracle, args.host, args.port)
    host, port = server.server_address[:2]
    print(f"mock oracle listening on http://{host}:{port}/", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        log.info("served %d queries", oracle.ledger.count)
    return EXIT_OK


def _cmd_metrics(args) -> int:
    try:
        a, b = read_wav(args.original), read_wav(args.adversarial)
        out = {"l2_distance": l2_distance(a, b), "linf": float(np.max(np.abs(a.samples - b.samples)))}
        try:
            out["snr_db"] = snr_db(a, b)
        except UndefinedSNRError:
            out["snr_db"] = None
    except (OSError, ValueError) as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    print(json.dumps(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="occam", description="Decision-based audio adversarial attacks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attack", help="run an experiment from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("mock-oracle", help="mock remote decision oracle")
    mock_sub = p.add_subparsers(dest="mock_command", required=True)
    s = mock_sub.add_parser("serve", help="serve a synthetic oracle over HTTP")
    s.add_argument("--port", type=int, required=True)
    s.add_argument("--spec", required=True, help="oracle spec JSON file")
    s.add_argument("--host", default="127.0.0.1")
    s.set_defaults(func=_cmd_serve)

    p = sub.add_parser("metrics", help="distance and SNR between two WAV files")
    p.add_argument("original")
    p.add_argument("adversarial")
    p.set_defaults(func=_cmd_metrics)
    return parser


def _setup_logging():
    level = os.environ.get("OCCAM_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
