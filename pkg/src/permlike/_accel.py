"""Numba switch.

Set ``PERMLIKE_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy.  The choice is made once, at import time.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("PERMLIKE_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and _FLAG not in {"1", "true", "yes", "on"}


def jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
