"""Unpivoted LDL^T kernels for the quasi-definite augmented solve path.

scipy.linalg.ldl is Bunch-Kaufman with symmetric pivoting, which permutes
rows and can emit 2x2 pivot blocks; the augmented saddle systems solved
here are quasi-definite after static regularization, so a plain scalar
LDL^T without any pivoting is both valid and what the solve path needs.
The factor loop is compiled with numba when numba is importable; setting
SQVAR_BACKEND=numpy forces the vectorized numpy fallback instead.
benchmarks/bench_ldlt.py times the two kernels against each other.
"""

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional speedup
    njit = None


def _factor_numpy(k, piv_tol):
    # Right-looking with rank-1 updates. Overwrites k: the unit-lower factor
    # lands below the diagonal and the pivots on it. Only the lower triangle
    # is meaningful afterwards. Returns the index of the first pivot whose
    # magnitude fell under piv_tol, or -1 on success.
    n = k.shape[0]
    for j in range(n):
        pj = k[j, j]
        if abs(pj) < piv_tol:
            return j
        col = k[j + 1:, j]
        k[j + 1:, j + 1:] -= np.outer(col / pj, col)
        k[j + 1:, j] = col / pj
    return -1


def _factor_loops(k, piv_tol):
    # Same elimination order as _factor_numpy, written with scalar loops so
    # numba can compile it; touches only the lower triangle.
    n = k.shape[0]
    for j in range(n):
        pj = k[j, j]
        if abs(pj) < piv_tol:
            return j
        for i in range(j + 1, n):
            cij = k[i, j]
            if cij != 0.0:
                s = cij / pj
                for l in range(j + 1, i + 1):
                    k[i, l] -= s * k[l, j]
        for i in range(j + 1, n):
            k[i, j] /= pj
    return -1


if njit is not None:
    _factor_numba = njit(cache=True)(_factor_loops)
else:
    _factor_numba = None


def backend():
    """Kernel in use: "numba" unless SQVAR_BACKEND=numpy or numba is absent."""
    if os.environ.get("SQVAR_BACKEND", "").strip().lower() == "numpy":
        return "numpy"
    return "numpy" if _factor_numba is None else "numba"


def factor(k, piv_tol):
    """Factor the symmetric matrix k in place (lower triangle referenced).

    On return the strict lower triangle of k holds the unit-lower factor L
    and the diagonal holds the pivots d, so that L diag(d) L^T reproduces
    the input. Returns -1, or the index of the first rejected pivot.
    """
    if backend() == "numba":
        return _factor_numba(k, piv_tol)
    return _factor_numpy(k, piv_tol)
