"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``MKPTAU_PURE_PYTHON=1`` to force the fallback.
"""
import os

from ._pykernels import DEG_BITS, DEG_MASK, EXP_BITS, MAX_EXACT_DEGREE
from . import _pykernels

BACKEND = "python"
if os.environ.get("MKPTAU_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

add_terms = _impl.add_terms
mul_terms = _impl.mul_terms
scale_terms = _impl.scale_terms

__all__ = [
    "BACKEND", "DEG_BITS", "DEG_MASK", "EXP_BITS", "MAX_EXACT_DEGREE",
    "add_terms", "mul_terms", "scale_terms",
]
