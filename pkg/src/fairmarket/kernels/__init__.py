"""Allocation enumeration kernels.

The compiled ``_enum`` extension is used when it imports and the magnitudes
fit in 64 bits; otherwise the pure-Python module is used. Set
``FAIRMARKET_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _enum_py

try:  # pragma: no cover - depends on build
    if os.environ.get("FAIRMARKET_PURE_PYTHON"):
        raise ImportError
    from . import _enum as _compiled
    import numpy as _np
except ImportError:  # pragma: no cover
    _compiled = None

HAVE_COMPILED = _compiled is not None
_LIMIT = 1 << 62

MNW = 0
LEXIMIN = 1


def backend_name() -> str:
    return "cython" if HAVE_COMPILED else "python"


def _fits(values, mode: int) -> bool:
    n = len(values)
    biggest = max(sum(row) for row in values)
    if mode == MNW:
        return biggest ** n < _LIMIT
    return biggest < _LIMIT


def first_dominating(values, base, backend: str | None = None):
    """First assignment (lexicographic) whose utilities dominate ``base``."""
    if _use_compiled(backend) and _fits(values, LEXIMIN) and max(base) < _LIMIT:
        return _compiled.first_dominating(_np.ascontiguousarray(values, dtype=_np.int64),
                                          _np.ascontiguousarray(base, dtype=_np.int64))
    return _enum_py.first_dominating(values, base)


def best_assignment(values, mode: int, backend: str | None = None):
    """Return (assignment, key) maximising the mode's key; first maximiser wins."""
    if _use_compiled(backend) and _fits(values, mode):
        return _compiled.best_assignment(_np.ascontiguousarray(values, dtype=_np.int64), mode)
    return _enum_py.best_assignment(values, mode)


def _use_compiled(backend: str | None) -> bool:
    if backend == "python":
        return False
    if backend == "cython" and not HAVE_COMPILED:
        raise RuntimeError("compiled kernels are not built")
    return HAVE_COMPILED
