"""Numba switch.

Kernels are written once in the numba-compatible subset of Python and run
either compiled (default) or interpreted over the same numpy arrays.  Set
``WTAGROWTH_NO_JIT=1`` to force the interpreted path; every kernel keeps a
``py_func`` attribute either way so both paths can be compared in-process.
"""

import os

ENV_FLAG = "WTAGROWTH_NO_JIT"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_JIT = numba is not None and os.environ.get(ENV_FLAG, "").strip() in ("", "0")


def njit(fn):
    if USE_JIT:
        return numba.njit(cache=True, nogil=True)(fn)
    fn.py_func = fn
    return fn
