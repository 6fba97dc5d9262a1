"""Backend selection for the inner-loop kernels.

The compiled extension ``occam._ckernels`` is preferred; the numpy fallback
in ``occam._pykernels`` is used when it is missing or when the environment
variable ``OCCAM_PURE`` is set to a non-empty value other than ``0``.
"""
import os

from . import _pykernels

_force_pure = os.environ.get("OCCAM_PURE", "") not in ("", "0")

if _force_pure:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

biased_offspring = _impl.biased_offspring
evolution_update = _impl.evolution_update
gather = _impl.gather
scatter = _impl.scatter

__all__ = ["BACKEND", "biased_offspring", "evolution_update", "gather", "scatter"]
