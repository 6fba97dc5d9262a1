"""Decision-based black-box adversarial optimization for audio.

Cooperative co-evolution over a biased (1+1)-CMA-ES with adaptive
decomposition, a differential-evolution and a plain-ES baseline, and a
query-free gradient-inversion attack against a differentiable substitute.
"""
from .audio import AudioVector, l2_distance, local_smooth, read_wav, resample, snr_db, write_wav
from .baselines import DeaConfig, run_dea, run_evolutionary
from .boundary import binary_search_to_boundary
from .driver import AttackConfig, AttackResult, run_occam
from .errors import (BudgetExhausted, DimensionError, InvalidStart, OccamError, TransportError,
                     UndefinedSNRError, ValidationError, WavFormatError)
from .inversion import InversionConfig, ToySubstituteModel, run_ni_occam
from .kernels import BACKEND
from .objective import AttackObjective, ObjectiveValue, TargetSpec
from .oracle import BallOracle, HalfspaceOracle, OracleSpec, RemoteOracle, TemplateOracle, build_oracle

__version__ = "0.1.0"
