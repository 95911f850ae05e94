"""Symmetric nonnegative matrix factorization by direct square
substitution. The target problem is

    minimize f(X) = ||X X' - M||_F^2  over X >= 0 (n x r),

solved either directly by projected gradient on X, or unconstrained in
V after substituting X = V * V (elementwise). Five variants share the
objective machinery: pg and gd with backtracking line searches,
pg_polyak and gd_polyak with half Polyak steps, and an L-BFGS loop on
the substituted objective. Convergence is declared on the normalized
accuracy acc = f(X) / ||M||_F^2.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ._rng import philox_rng
from .report import SolveTrace

__all__ = [
    "NmfProblem",
    "NmfResult",
    "MaxIterReached",
    "gen_nmf",
    "nmf_init",
    "nmf_value_grad",
    "nmf_solve",
    "VARIANTS",
]

log = logging.getLogger(__name__)

VARIANTS = ("pg", "pg_polyak", "gd", "gd_polyak", "lbfgs")

_SHRINK = 0.35
_GROW = 2.0
_LBFGS_MEMORY = 10
_LBFGS_ARMIJO = 1e-4
_LBFGS_SHRINK = 0.5
_STALL_ALPHA = 1e-30


@dataclass(frozen=True)
class NmfProblem:
    """Factorization target M = U U' with the generating factor kept
    around for tests; M is symmetric positive semidefinite by
    construction.
    """

    m: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "u", u)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("m must be square")
        if u.ndim != 2 or u.shape[0] != m.shape[0]:
            raise ValueError("u must be n x r")
        if np.abs(m - m.T).max() > 1e-10 * (1.0 + np.abs(m).max()):
            raise ValueError("m must be symmetric")

    @property
    def n(self):
        return self.m.shape[0]

    @property
    def r(self):
        return self.u.shape[1]


@dataclass(frozen=True)
class NmfResult:
    x: np.ndarray
    iterations: int
    acc: float
    trace: SolveTrace


class MaxIterReached(RuntimeError):
    """Raised when a solve exhausts max_iter without reaching eps."""


def gen_nmf(n, r, seed, u_override=None):
    """Random instance M = U U' with U i.i.d. uniform on [0,1].

    u_override replaces the random factor (the identity gives M = I),
    mainly for constructing exact corner cases in tests.
    """
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    if u_override is not None:
        u = np.asarray(u_override, dtype=float)
        if u.shape != (n, r):
            raise ValueError("u_override must be n x r")
        if u.min() < 0.0:
            raise ValueError("u_override must be nonnegative")
    else:
        u = philox_rng(seed, stream=0).uniform(0.0, 1.0, size=(n, r))
    return NmfProblem(m=u @ u.T, u=u)


def nmf_init(p, seed):
    """Starting factor V0: i.i.d. uniform entries scaled so that V0*V0
    has roughly the magnitude of an exact factor, via (mean(M)/r)^(1/4).
    """
    rng = philox_rng(seed, stream=1)
    scale = (p.m.mean() / p.r) ** 0.25
    return scale * rng.uniform(0.0, 1.0, size=(p.n, p.r))


# ---- objective machinery ----


def _f_value_grad(m, x):
    """Original-formulation objective and gradient at X."""
    gap = x @ x.T - m
    return float(np.sum(gap * gap)), 4.0 * (gap @ x)


def _f_value(m, x):
    gap = x @ x.T - m
    return float(np.sum(gap * gap))


def nmf_value_grad(m, v):
    """Substituted objective F(V) = f(V*V) and its gradient.

    The chain rule through X = V*V turns the original gradient into
    G = 2V * (4 (XX' - M) X), elementwise in the first product.
    """
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != m.shape[0]:
        raise ValueError("v must be n x r")
    x = v * v
    value, grad_x = _f_value_grad(m, x)
    return value, 2.0 * v * grad_x


def _backtrack(value_at, f0, alpha):
    """Shrink alpha by the backtracking factor until the step decreases
    the objective; returns (alpha, new value). Raises MaxIterReached if
    alpha underflows, which only happens at a stationary point.
    """
    while True:
        f_new = value_at(alpha)
        if f_new < f0:
            return alpha, f_new
        alpha *= _SHRINK
        if alpha < _STALL_ALPHA:
            raise MaxIterReached("line search stalled")


# ---- solver variants ----


def _solve_pg(m, x, eps, max_iter, norm2, polyak):
    trace = SolveTrace(("iter", "F", "acc"))
    f0 = _f_value(m, x)
    alpha = 1.0
    for k in range(max_iter + 1):
        acc = f0 / norm2
        trace.append(k, f0, acc)
        if acc <= eps:
            return x, k, acc, trace
        if k == max_iter:
            break
        _, grad = _f_value_grad(m, x)
        if polyak:
            gnorm2 = float(np.sum(grad * grad))
            if gnorm2 == 0.0:
                raise MaxIterReached("zero gradient away from a solution")
            step = f0 / (2.0 * gnorm2)
            x = np.maximum(x - step * grad, 0.0)
            f_new = _f_value(m, x)
            if f_new > f0:
                log.debug("pg_polyak objective rose at iteration %d", k)
            f0 = f_new
        else:
            alpha, f0 = _backtrack(
                lambda a: _f_value(m, np.maximum(x - a * grad, 0.0)),
                f0, alpha)
            x = np.maximum(x - alpha * grad, 0.0)
            alpha *= _GROW
    raise MaxIterReached("no convergence in %d iterations" % max_iter)


def _solve_gd(m, v, eps, max_iter, norm2, polyak):
    trace = SolveTrace(("iter", "F", "acc"))
    f0, grad = nmf_value_grad(m, v)
    alpha = 1.0
    for k in range(max_iter + 1):
        acc = f0 / norm2
        trace.append(k, f0, acc)
        if acc <= eps:
            return v * v, k, acc, trace
        if k == max_iter:
            break
        if polyak:
            gnorm2 = float(np.sum(grad * grad))
            if gnorm2 == 0.0:
                raise MaxIterReached("zero gradient away from a solution")
            v = v - (f0 / (2.0 * gnorm2)) * grad
            f_new, grad = nmf_value_grad(m, v)
            if f_new > f0:
                log.debug("gd_polyak objective rose at iteration %d", k)
            f0 = f_new
        else:
            alpha, f0 = _backtrack(
                lambda a: _f_value(m, (v - a * grad) ** 2), f0, alpha)
            v = v - alpha * grad
            _, grad = nmf_value_grad(m, v)
            alpha *= _GROW
    raise MaxIterReached("no convergence in %d iterations" % max_iter)


def _solve_lbfgs(m, v, eps, max_iter, norm2):
    """Two-loop L-BFGS on the substituted objective with an Armijo
    backtracking line search; memory pairs with nonpositive curvature
    are skipped rather than damped.
    """
    trace = SolveTrace(("iter", "F", "acc"))
    shape = v.shape
    pos = v.ravel().copy()
    f0, grad = nmf_value_grad(m, pos.reshape(shape))
    g = grad.ravel()
    mem = []
    for k in range(max_iter + 1):
        acc = f0 / norm2
        trace.append(k, f0, acc)
        if acc <= eps:
            return (pos.reshape(shape)) ** 2, k, acc, trace
        if k == max_iter:
            break

        d = -g
        coeffs = []
        for s, y, rho in reversed(mem):
            a = rho * (s @ d)
            coeffs.append(a)
            d = d - a * y
        if mem:
            s, y, rho = mem[-1]
            d = d * ((s @ y) / (y @ y))
        for (s, y, rho), a in zip(mem, reversed(coeffs)):
            b = rho * (y @ d)
            d = d + (a - b) * s

        slope = float(g @ d)
        if slope >= 0.0:
            d = -g
            slope = -float(g @ g)
            if slope == 0.0:
                raise MaxIterReached("zero gradient away from a solution")
        alpha = 1.0
        while True:
            f_new = _f_value(m, ((pos + alpha * d).reshape(shape)) ** 2)
            if f_new <= f0 + _LBFGS_ARMIJO * alpha * slope:
                break
            alpha *= _LBFGS_SHRINK
            if alpha < _STALL_ALPHA:
                raise MaxIterReached("line search stalled")
        new_pos = pos + alpha * d
        _, new_grad = nmf_value_grad(m, new_pos.reshape(shape))
        new_g = new_grad.ravel()
        s = new_pos - pos
        y = new_g - g
        sy = float(s @ y)
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            mem.append((s, y, 1.0 / sy))
            if len(mem) > _LBFGS_MEMORY:
                mem.pop(0)
        pos, g, f0 = new_pos, new_g, f_new
    raise MaxIterReached("no convergence in %d iterations" % max_iter)


def nmf_solve(p, variant="lbfgs", eps=1e-4, max_iter=20000, v0=None,
              seed=0):
    """Run one NMF solve and return the factor with its accuracy.

    pg variants iterate on X directly with projection onto the
    nonnegative orthant and start at V0*V0; the substituted variants
    iterate on V. v0 overrides the standard start from nmf_init(p,
    seed). Raises MaxIterReached when acc stays above eps for max_iter
    iterations.
    """
    if variant not in VARIANTS:
        raise ValueError("unknown variant %r" % (variant,))
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    norm2 = float(np.sum(p.m * p.m))
    if norm2 == 0.0:
        raise ValueError("m must be nonzero")
    v = nmf_init(p, seed) if v0 is None else np.asarray(v0, dtype=float)
    if v.shape != (p.n, p.r):
        raise ValueError("v0 must be n x r")

    if variant == "pg":
        x, k, acc, trace = _solve_pg(p.m, v * v, eps, max_iter, norm2,
                                     polyak=False)
    elif variant == "pg_polyak":
        x, k, acc, trace = _solve_pg(p.m, v * v, eps, max_iter, norm2,
                                     polyak=True)
    elif variant == "gd":
        x, k, acc, trace = _solve_gd(p.m, v, eps, max_iter, norm2,
                                     polyak=False)
    elif variant == "gd_polyak":
        x, k, acc, trace = _solve_gd(p.m, v, eps, max_iter, norm2,
                                     polyak=True)
    else:
        x, k, acc, trace = _solve_lbfgs(p.m, v, eps, max_iter, norm2)
    return NmfResult(x=x, iterations=k, acc=acc, trace=trace)
