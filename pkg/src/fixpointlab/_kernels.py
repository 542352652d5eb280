"""Hot numeric kernels: suffix tail-diameters of iterate traces.

Two implementations of each kernel are kept side by side: a numba
@njit version and a pure-numpy fallback.  Selection happens once at
import time — set FIXPOINT_NUMBA=0 to force the numpy path (the numpy
path is also used automatically when numba is unavailable).  Both
backends are exercised by the test suite and compared by
benchmarks/bench_kernels.py.

Kernel contract: given a trace x_0..x_N, suffix_diameters returns
b_n = max over n <= i,j <= N of d(x_i, x_j) for n = 0..N.
"""
from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("FIXPOINT_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "no", "off")

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


# --- pure numpy implementations -------------------------------------------

def suffix_diameters_scalar_numpy(xs: np.ndarray) -> np.ndarray:
    # On the real line the suffix diameter is suffix max minus suffix min.
    rev_max = np.maximum.accumulate(xs[::-1])[::-1]
    rev_min = np.minimum.accumulate(xs[::-1])[::-1]
    return rev_max - rev_min

def suffix_diameters_euclidean_numpy(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[0]
    out = np.zeros(n, dtype=np.float64)
    best = 0.0
    for i in range(n - 2, -1, -1):
        diffs = pts[i + 1:] - pts[i]
        row = float(np.sqrt(np.sum(diffs * diffs, axis=1)).max())
        if row > best:
            best = row
        out[i] = best
    return out


# --- numba implementations --------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _suffix_diameters_scalar_nb(xs):
        n = xs.shape[0]
        out = np.empty(n, dtype=np.float64)
        cur_max = xs[n - 1]
        cur_min = xs[n - 1]
        for i in range(n - 1, -1, -1):
            v = xs[i]
            if v > cur_max:
                cur_max = v
            if v < cur_min:
                cur_min = v
            out[i] = cur_max - cur_min
        return out

    @njit(cache=True)
    def _suffix_diameters_euclidean_nb(pts):
        n, dim = pts.shape
        out = np.zeros(n, dtype=np.float64)
        best = 0.0
        for i in range(n - 2, -1, -1):
            row = 0.0
            for j in range(i + 1, n):
                s = 0.0
                for k in range(dim):
                    diff = pts[i, k] - pts[j, k]
                    s += diff * diff
                dist = np.sqrt(s)
                if dist > row:
                    row = dist
            if row > best:
                best = row
            out[i] = best
        return out

    def suffix_diameters_scalar_numba(xs: np.ndarray) -> np.ndarray:
        return _suffix_diameters_scalar_nb(np.ascontiguousarray(xs, dtype=np.float64))

    def suffix_diameters_euclidean_numba(pts: np.ndarray) -> np.ndarray:
        return _suffix_diameters_euclidean_nb(np.ascontiguousarray(pts, dtype=np.float64))


# --- backend selection -------------------------------------------------------

if _HAVE_NUMBA and _WANT_NUMBA:
    BACKEND = "numba"
    suffix_diameters_scalar = suffix_diameters_scalar_numba
    suffix_diameters_euclidean = suffix_diameters_euclidean_numba
else:
    BACKEND = "numpy"
    suffix_diameters_scalar = suffix_diameters_scalar_numpy
    suffix_diameters_euclidean = suffix_diameters_euclidean_numpy


def backend_name() -> str:
    """Active kernel backend, "numba" or "numpy"."""
    return BACKEND
