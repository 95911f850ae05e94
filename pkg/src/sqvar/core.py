"""Dense linear algebra shared by the solvers and the certificate checkers.

Conventions: vectors are 1-d float ndarrays, matrices are 2-d row-major
ndarrays, and diagonal matrices travel as their diagonal vector, so that a
product with a diagonal matrix is an elementwise product. Everything is
dense on purpose; the largest systems in the test set have a couple of
thousand rows.
"""

import numpy as np
from scipy.linalg import solve_triangular

from . import _ldlt

__all__ = [
    "SingularSystem",
    "NotSymmetric",
    "RankDeficient",
    "as_vector",
    "as_matrix",
    "hadamard_pow",
    "solve_augmented",
    "sym_eig_min",
    "nullspace_basis",
]

_PIVOT_REJECT = 1e-14
_STATIC_REG = 1e-12


class SingularSystem(Exception):
    """A factorization pivot fell under the rejection threshold."""


class NotSymmetric(Exception):
    """Matrix is not symmetric to the required tolerance."""


class RankDeficient(Exception):
    """Matrix does not have full row rank."""


# ---------------------------------------------------------------------------
# construction / validation
# ---------------------------------------------------------------------------

def as_vector(x, name="vector"):
    """Coerce to a finite 1-d float array; scalars become length-1 vectors."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError("%s must be 1-dimensional, got shape %s" % (name, v.shape))
    if not np.all(np.isfinite(v)):
        raise ValueError("%s contains NaN or Inf" % name)
    return v


def as_matrix(a, name="matrix"):
    """Coerce to a finite 2-d float array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError("%s must be 2-dimensional, got shape %s" % (name, m.shape))
    if not np.all(np.isfinite(m)):
        raise ValueError("%s contains NaN or Inf" % name)
    return m


def hadamard_pow(v, power):
    """Elementwise integer power: result_i = v_i ** power, power >= 1."""
    p = int(power)
    if p != power or p < 1:
        raise ValueError("power must be a positive integer")
    return as_vector(v) ** p


# ---------------------------------------------------------------------------
# saddle-point solve
# ---------------------------------------------------------------------------

def solve_augmented(d, a, r_top, r_bot, path="normal"):
    """Solve [[-D, A^T], [A, 0]] [dx; dlam] = [r_top; r_bot], D = diag(d) > 0.

    path="normal" eliminates dx and factors the Schur complement
    A D^-1 A^T with Cholesky. path="augmented" factors the full
    quasi-definite matrix by unpivoted LDL^T with a static 1e-12 diagonal
    regularization, which holds up better when D is badly scaled.

    Returns (dx, dlam). Raises SingularSystem when a pivot falls below
    1e-14 times the matrix scale.
    """
    d = as_vector(d, "d")
    a = as_matrix(a, "a")
    r_top = as_vector(r_top, "r_top")
    r_bot = as_vector(r_bot, "r_bot")
    m, n = a.shape
    if d.shape != (n,) or r_top.shape != (n,) or r_bot.shape != (m,):
        raise ValueError("inconsistent dimensions for the augmented system")
    if np.any(d <= 0.0):
        raise ValueError("d must be strictly positive")
    if path == "normal":
        return _solve_normal(d, a, r_top, r_bot)
    if path == "augmented":
        return _solve_quasidef(d, a, r_top, r_bot)
    raise ValueError("unknown path %r" % (path,))


def _solve_normal(d, a, r_top, r_bot):
    ad = a / d
    schur = ad @ a.T
    try:
        chol = np.linalg.cholesky(schur)
    except np.linalg.LinAlgError:
        raise SingularSystem("Cholesky of A D^-1 A^T broke down") from None
    # the pivot test compares like with like: diagonal entries of the
    # factor against the factor's own largest pivot, so a legitimately
    # wide spread in D (routine late in an interior-point run) is not
    # mistaken for rank collapse
    piv = np.diagonal(chol)
    if piv.min() < _PIVOT_REJECT * piv.max():
        raise SingularSystem("Cholesky pivot below 1e-14 * scale")

    def apply(rt, rb):
        y = solve_triangular(chol, rb + ad @ rt, lower=True)
        lam = solve_triangular(chol.T, y, lower=False)
        return (a.T @ lam - rt) / d, lam

    return _refine(apply, d, a, r_top, r_bot)


def _solve_quasidef(d, a, r_top, r_bot):
    m, n = a.shape
    size = n + m
    k = np.zeros((size, size))
    k[:n, :n] = -np.diag(d)
    k[n:, :n] = a
    k[:n, n:] = a.T
    scale = np.abs(k).max()
    # static regularization keeps the matrix strictly quasi-definite; note it
    # is absolute, so a badly scaled singular system still trips the
    # scale-relative pivot rejection below
    diag = np.arange(size)
    k[diag[:n], diag[:n]] -= _STATIC_REG
    k[diag[n:], diag[n:]] += _STATIC_REG
    fail = _ldlt.factor(k, _PIVOT_REJECT * scale)
    if fail >= 0:
        raise SingularSystem("LDL^T pivot %d below 1e-14 * scale" % fail)
    piv = np.diagonal(k).copy()

    def apply(rt, rb):
        z = solve_triangular(k, np.concatenate([rt, rb]), lower=True,
                             unit_diagonal=True)
        z /= piv
        sol = solve_triangular(k.T, z, lower=False, unit_diagonal=True)
        return sol[:n], sol[n:]

    return _refine(apply, d, a, r_top, r_bot)


def _refine(apply_fn, d, a, r_top, r_bot):
    """Iterative refinement around a factorization-backed solver.

    The Schur-complement reduction is not backward stable for the
    augmented system when d spans many orders of magnitude (the usual
    state of an interior-point method near convergence), and the LDL^T
    path carries the perturbation of its static regularization. A few
    corrections with the existing factorization restore residuals to
    roundoff level relative to the size of the terms.
    """
    dx, dlam = apply_fn(r_top, r_bot)
    prev = np.inf
    for _ in range(3):
        at_lam = a.T @ dlam
        ddx = d * dx
        e_top = r_top - (at_lam - ddx)
        e_bot = r_bot - a @ dx
        err = np.hypot(np.linalg.norm(e_top), np.linalg.norm(e_bot))
        floor = 1e-14 * (1.0 + np.linalg.norm(r_top) + np.linalg.norm(r_bot)
                         + np.linalg.norm(at_lam) + np.linalg.norm(ddx))
        if err <= floor or err >= 0.5 * prev:
            break
        cx, clam = apply_fn(e_top, e_bot)
        dx = dx + cx
        dlam = dlam + clam
        prev = err
    return dx, dlam


# ---------------------------------------------------------------------------
# eigenvalues and nullspaces
# ---------------------------------------------------------------------------

def sym_eig_min(m_sym):
    """Smallest eigenvalue of a symmetric matrix."""
    m_sym = as_matrix(m_sym, "matrix")
    r, c = m_sym.shape
    if r != c:
        raise NotSymmetric("matrix is %dx%d, not square" % (r, c))
    norm = np.linalg.norm(m_sym)
    if norm > 0.0 and np.linalg.norm(m_sym - m_sym.T) > 1e-12 * norm:
        raise NotSymmetric("relative asymmetry exceeds 1e-12")
    return float(np.linalg.eigvalsh(0.5 * (m_sym + m_sym.T))[0])


def nullspace_basis(a):
    """Orthonormal basis of the kernel of a full-row-rank matrix.

    For an m x n input with m <= n, returns the n x (n - m) matrix Z with
    orthonormal columns and A Z = 0, obtained from the trailing columns of
    a complete QR of A^T. Raises RankDeficient when a QR pivot magnitude
    drops under 1e-12 * ||A||.
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    if m > n:
        raise RankDeficient("more rows (%d) than columns (%d)" % (m, n))
    q, r = np.linalg.qr(a.T, mode="complete")
    if m > 0:
        anorm = np.linalg.norm(a)
        if anorm == 0.0 or np.min(np.abs(np.diagonal(r))) < 1e-12 * anorm:
            raise RankDeficient("QR pivot below 1e-12 * norm(A)")
    return q[:, m:]
