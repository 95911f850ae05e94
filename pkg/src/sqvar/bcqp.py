"""Bound-constrained convex QP: generator, projected-gradient baseline, and
scaled gradient descent on the squared-variable objective F(v) = f(v * v).

The model problem is minimize 0.5 x'Qx + b'x subject to x >= 0 with Q
symmetric positive definite, built so the unconstrained minimizer x_ref
is known.
"""

from dataclasses import dataclass

import numpy as np

from ._rng import philox_rng
from .core import as_matrix, as_vector
from .optcert import bc_prox_residual
from .report import SolveTrace

__all__ = [
    "QpProblem",
    "BcSolveResult",
    "gen_qp",
    "standard_init",
    "qp_objective",
    "qp_grad",
    "dss_value_grad",
    "dss_hess_diag",
    "pg_solve",
    "dss_gd_scaled_solve",
]

_TRACE_COLUMNS = ("iter", "obj", "prox_residual", "alpha")
_ALPHA_FLOOR = 1e-20
_V_FLOOR = 1e-5


@dataclass(frozen=True)
class QpProblem:
    """Convex QP over the nonnegative orthant with a known reference point.

    Invariants checked on construction: Q symmetric, spectrum inside
    [1/kappa, 1] up to 1e-8, and Q x_ref + b = 0 up to 1e-10.
    """

    q: np.ndarray
    b: np.ndarray
    x_ref: np.ndarray
    kappa: float

    def __post_init__(self):
        q = as_matrix(self.q, "q")
        b = as_vector(self.b, "b")
        x_ref = as_vector(self.x_ref, "x_ref")
        n = b.size
        if q.shape != (n, n) or x_ref.shape != (n,):
            raise ValueError("inconsistent QpProblem dimensions")
        if self.kappa < 1.0:
            raise ValueError("kappa must be at least 1")
        qnorm = np.linalg.norm(q)
        if qnorm > 0.0 and np.linalg.norm(q - q.T) > 1e-12 * qnorm:
            raise ValueError("q must be symmetric")
        eigs = np.linalg.eigvalsh(q)
        if eigs[0] < 1.0 / self.kappa - 1e-8 or eigs[-1] > 1.0 + 1e-8:
            raise ValueError("spectrum of q leaves [1/kappa, 1]")
        if np.linalg.norm(q @ x_ref + b) > 1e-10:
            raise ValueError("x_ref is not the unconstrained minimizer")

    @property
    def n(self):
        return self.b.size


@dataclass(frozen=True)
class BcSolveResult:
    x: np.ndarray
    iterations: int
    objective: float
    prox_residual: float
    converged: bool
    trace: SolveTrace


def gen_qp(n, kappa, seed):
    """Random QP: eigenvalues log-uniform on [1/kappa, 1], eigenvectors from
    the QR of a standard-normal matrix, x_ref standard normal, b = -Q x_ref.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if kappa < 1.0:
        raise ValueError("kappa must be at least 1")
    rng = philox_rng(seed, stream=0)
    eigs = np.exp(rng.uniform(-np.log(kappa), 0.0, size=n))
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q = (basis * eigs) @ basis.T
    q = 0.5 * (q + q.T)
    x_ref = rng.standard_normal(n)
    b = -(q @ x_ref)
    return QpProblem(q=q, b=b, x_ref=x_ref, kappa=float(kappa))


def standard_init(n, seed):
    """Starting points x0_i = max(phi_i, 0) + 1 with phi standard normal,
    and v0 = sqrt(x0) elementwise. Drawn on a separate stream from gen_qp
    so the start does not correlate with the problem data.
    """
    rng = philox_rng(seed, stream=1)
    x0 = np.maximum(rng.standard_normal(n), 0.0) + 1.0
    return x0, np.sqrt(x0)


def qp_objective(p, x):
    return float(0.5 * (x @ (p.q @ x)) + p.b @ x)


def qp_grad(p, x):
    return p.q @ x + p.b


def dss_value_grad(p, v):
    """F(v) = f(v * v) and its gradient 2 v * grad f(v * v)."""
    x = v * v
    g = qp_grad(p, x)
    return qp_objective(p, x), 2.0 * v * g


def dss_hess_diag(p, v):
    """Diagonal of hess F(v) = 2 diag(grad f) + 4 V hess f V."""
    x = v * v
    return 2.0 * qp_grad(p, x) + 4.0 * x * np.diagonal(p.q)


def _accepts(f_new, f_old, decrease, armijo):
    if armijo:
        return f_new <= f_old + 1e-4 * decrease
    return f_new < f_old


def _nudge_off_zero(v_new, v_old):
    """Keep every |v_i| at or above _V_FLOOR, preserving sign.

    The set {v_i = 0} is absorbing for any gradient method on F(v) =
    f(v * v): the i-th gradient component vanishes there forever, so an
    iterate that lands exactly on it can never recover if the sign of
    grad f flips later. The floor is far below every tolerance of
    interest (it perturbs x = v * v by 1e-10) but keeps the escape
    channel open. Components that were driven to exact zero inherit the
    sign they approached from.
    """
    small = np.abs(v_new) < _V_FLOOR
    if not small.any():
        return v_new
    out = v_new.copy()
    signs = np.where(v_new[small] != 0.0, np.sign(v_new[small]),
                     np.sign(v_old[small]))
    out[small] = signs * _V_FLOOR
    return out


def pg_solve(p, x0, tol, max_iter=10000, armijo=False):
    """Projected gradient x+ = max(x - alpha g, 0) with backtracking.

    The step is halved until the objective decreases and the next trial
    starts at 1.5 times the accepted value. Stops when the projected
    gradient residual drops under tol; hitting max_iter flags the result
    instead of raising.
    """
    x = as_vector(x0, "x0").copy()
    if x.shape != (p.n,):
        raise ValueError("x0 has the wrong length")
    if np.any(x < 0.0):
        raise ValueError("x0 must be nonnegative")
    trace = SolveTrace(_TRACE_COLUMNS)
    fx = qp_objective(p, x)
    g = qp_grad(p, x)
    res = bc_prox_residual(g, x)
    trace.append(0, fx, res, 0.0)
    alpha_init = 1.0
    k = 0
    while res > tol and k < max_iter:
        alpha = alpha_init
        while True:
            x_new = np.maximum(x - alpha * g, 0.0)
            f_new = qp_objective(p, x_new)
            if _accepts(f_new, fx, g @ (x_new - x), armijo):
                break
            alpha *= 0.5
            if alpha < _ALPHA_FLOOR:
                break
        if f_new < fx:
            x, fx = x_new, f_new
        alpha_init = 1.5 * alpha
        k += 1
        g = qp_grad(p, x)
        res = bc_prox_residual(g, x)
        trace.append(k, fx, res, alpha)
    return BcSolveResult(x=x, iterations=k, objective=fx, prox_residual=res,
                         converged=bool(res <= tol), trace=trace)


def dss_gd_scaled_solve(p, v0, tol, max_iter=10000, armijo=False):
    """Gradient descent on F(v) = f(v * v), switching to a diagonally
    scaled direction once ||grad F|| <= 0.1.

    The scaled direction is D^-1 grad F with D = diag(hess F) shifted
    just enough that every entry is at least 1e-5. Both phases use the
    same step policy as pg_solve: halve until the objective decreases,
    start the next search at 1.5 times the accepted value (the scaled
    phase keeps its own memory, seeded at the unit step). A fixed unit
    scaled step is not safe here: D underestimates the curvature badly
    near coordinates where diag(hess F) goes negative, and on instances
    where the top eigenvalue of D^-1 hess F sits just under 2 it
    oscillates at the edge of stability, so both cases are handled by
    the line search instead. If the scaled search fails outright the
    plain backtracking step is used. Convergence is measured on the
    original problem, through the projected-gradient residual at
    x = v * v.
    """
    v = as_vector(v0, "v0").copy()
    if v.shape != (p.n,):
        raise ValueError("v0 has the wrong length")
    if np.any(v == 0.0):
        raise ValueError("v0 must have no zero entries")
    trace = SolveTrace(_TRACE_COLUMNS)
    fx, big_g = dss_value_grad(p, v)
    res = bc_prox_residual(qp_grad(p, v * v), v * v)
    trace.append(0, fx, res, 0.0)
    alpha_gd = 1.0
    alpha_scaled = 1.0
    k = 0
    while res > tol and k < max_iter:
        used_alpha = None
        if np.linalg.norm(big_g) <= 0.1:
            diag = dss_hess_diag(p, v)
            shift = max(0.0, 1e-5 - diag.min())
            direction = big_g / (diag + shift)
            alpha = alpha_scaled
            while alpha >= _ALPHA_FLOOR:
                v_try = _nudge_off_zero(v - alpha * direction, v)
                f_try = qp_objective(p, v_try * v_try)
                if _accepts(f_try, fx, -alpha * (big_g @ direction), armijo):
                    v, fx = v_try, f_try
                    alpha_scaled = 1.5 * alpha
                    used_alpha = alpha
                    break
                alpha *= 0.5
        if used_alpha is None:
            alpha = alpha_gd
            while True:
                v_new = _nudge_off_zero(v - alpha * big_g, v)
                f_new = qp_objective(p, v_new * v_new)
                if _accepts(f_new, fx, -alpha * (big_g @ big_g), armijo):
                    break
                alpha *= 0.5
                if alpha < _ALPHA_FLOOR:
                    break
            if f_new < fx:
                v, fx = v_new, f_new
            alpha_gd = 1.5 * alpha
            used_alpha = alpha
        k += 1
        x = v * v
        g = qp_grad(p, x)
        big_g = 2.0 * v * g
        res = bc_prox_residual(g, x)
        trace.append(k, fx, res, used_alpha)
    return BcSolveResult(x=v * v, iterations=k, objective=fx,
                         prox_residual=res, converged=bool(res <= tol),
                         trace=trace)
