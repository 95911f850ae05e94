"""First and second order optimality certificates.

Checks exact and approximate conditions for four problem forms: the
bound-constrained original (minimize f over x >= 0), its direct square
substitution x = v * v, the inequality-constrained original
(c(x) >= 0), and its squared-slack form c(x) = v * v. Also computes the
constants that transfer approximate measures from the squared-slack form
back to the original.

Sign conventions: the Lagrangian is L(x, s) = f(x) - s . c(x) with
multiplier s >= 0, and hess_l always means its Hessian in x alone.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import (
    NotSymmetric,
    RankDeficient,
    as_matrix,
    as_vector,
    nullspace_basis,
    sym_eig_min,
)

__all__ = [
    "DimensionMismatch",
    "NotFirstOrder",
    "CallbackFailure",
    "RankDeficientActiveJacobian",
    "HypothesisViolated",
    "OutOfRange",
    "IndexPartition",
    "Dss2nReport",
    "Nlp2nMeasures",
    "Ssv2nMeasures",
    "L1StationarityReport",
    "bc_prox_residual",
    "bc_classify",
    "dss_bc_2n_check",
    "nlp_approx_2n_measure",
    "ssv_approx_2n_measure",
    "thm35_transfer",
    "l1dss_stationarity_check",
]


class DimensionMismatch(Exception):
    pass


class NotFirstOrder(Exception):
    """The point fails the first-order residual precondition."""


class CallbackFailure(Exception):
    """A user-supplied gradient or Hessian callback raised or returned junk."""


class RankDeficientActiveJacobian(Exception):
    """The rows of the Jacobian picked out by the active set are dependent."""


class HypothesisViolated(Exception):
    """A hypothesis of the transfer result fails for these inputs."""


class OutOfRange(Exception):
    """An approximate measure lies outside the admissible interval (0, 1]."""


@dataclass(frozen=True)
class IndexPartition:
    """Indices split by activity at a first-order point of min f, x >= 0."""

    inactive: np.ndarray
    active: np.ndarray
    degenerate: np.ndarray


@dataclass(frozen=True)
class Dss2nReport:
    is_first_order: bool
    is_2n: bool
    is_2s_strict: bool
    min_eig: float


@dataclass(frozen=True)
class Nlp2nMeasures:
    """Approximate KKT and second-order measures for c(x) >= 0 problems."""

    eps_foc: float
    eps_pf: float
    eps_cs: float
    eps_pd: float
    eps_soc: float
    zeta: float
    a: np.ndarray


@dataclass(frozen=True)
class Ssv2nMeasures:
    eps1: float
    eps2: float
    eps3: float


# ---------------------------------------------------------------------------
# bound-constrained form
# ---------------------------------------------------------------------------

def bc_prox_residual(grad, x):
    """Norm of the projected gradient step, ||x - max(x - grad, 0)||_2.

    Vanishes exactly at first-order points of min f(x) subject to x >= 0.
    """
    grad = as_vector(grad, "grad")
    x = as_vector(x, "x")
    if grad.shape != x.shape:
        raise DimensionMismatch("grad has shape %s, x has shape %s"
                                % (grad.shape, x.shape))
    return float(np.linalg.norm(x - np.maximum(x - grad, 0.0)))


def bc_classify(x, grad, tol):
    """Partition indices at a first-order point into inactive, active with
    positive gradient, and degenerate.

    Requires bc_prox_residual(grad, x) <= tol * (1 + ||grad||); raises
    NotFirstOrder otherwise.
    """
    x = as_vector(x, "x")
    grad = as_vector(grad, "grad")
    if x.shape != grad.shape:
        raise DimensionMismatch("x has shape %s, grad has shape %s"
                                % (x.shape, grad.shape))
    res = bc_prox_residual(grad, x)
    bound = tol * (1.0 + np.linalg.norm(grad))
    if res > bound:
        raise NotFirstOrder("prox residual %.3e exceeds %.3e" % (res, bound))
    inactive = x > tol
    active = ~inactive & (grad > tol)
    degenerate = ~inactive & ~active
    return IndexPartition(inactive=np.flatnonzero(inactive),
                          active=np.flatnonzero(active),
                          degenerate=np.flatnonzero(degenerate))


def dss_bc_2n_check(f_grad, f_hess, v, tol=1e-8):
    """Second-order check of F(v) = f(v * v) at v.

    Evaluates grad F(v) = 2 v * f'(v*v) and
    hess F(v) = 2 diag(f'(v*v)) + 4 V f''(v*v) V, then reports whether v is
    first order (||grad F|| <= tol), second-order nonnegative
    (min eig >= -tol), and strictly so (min eig > tol).
    """
    v = as_vector(v, "v")
    x = v * v
    try:
        g = as_vector(f_grad(x), "f_grad(x)")
        h = as_matrix(f_hess(x), "f_hess(x)")
    except Exception as exc:
        raise CallbackFailure("callback evaluation failed: %s" % exc) from exc
    n = v.size
    if g.shape != (n,) or h.shape != (n, n):
        raise CallbackFailure("callback shapes %s / %s do not match n=%d"
                              % (g.shape, h.shape, n))
    grad_big = 2.0 * v * g
    hess_big = 2.0 * np.diag(g) + 4.0 * (v[:, None] * h * v[None, :])
    try:
        min_eig = sym_eig_min(hess_big)
    except NotSymmetric as exc:
        raise CallbackFailure("hessian callback is not symmetric") from exc
    return Dss2nReport(
        is_first_order=bool(np.linalg.norm(grad_big) <= tol),
        is_2n=bool(min_eig >= -tol),
        is_2s_strict=bool(min_eig > tol),
        min_eig=min_eig,
    )


# ---------------------------------------------------------------------------
# inequality-constrained form and its squared-slack variant
# ---------------------------------------------------------------------------

def _check_nlp_dims(grad_f, x, s, c_val, jac):
    n = x.size
    m = c_val.size
    if grad_f.shape != (n,):
        raise DimensionMismatch("grad_f has shape %s, expected (%d,)"
                                % (grad_f.shape, n))
    if s.shape != (m,):
        raise DimensionMismatch("s has shape %s, expected (%d,)" % (s.shape, m))
    if jac.shape != (m, n):
        raise DimensionMismatch("jacobian has shape %s, expected (%d, %d)"
                                % (jac.shape, m, n))
    return n, m


def nlp_approx_2n_measure(grad_f, x, s, c_val, jac, hess_l, a, zeta):
    """Approximate first/second-order measures of min f s.t. c(x) >= 0.

    Parameters
    ----------
    grad_f : gradient of f at x; the Lagrangian gradient is formed here as
        grad_f - jac.T @ s.
    a : nonnegative weight vector in the primal-dual measure
        max(0, -min_i(s_i + a_i c_i)).
    zeta : activity cutoff; constraint i counts as active when c_i <= zeta.

    The curvature measure restricts hess_l to the nullspace of the active
    rows of jac (the identity when no rows are active) and penalizes its
    negative part. Raises RankDeficientActiveJacobian when the active rows
    are linearly dependent.
    """
    grad_f = as_vector(grad_f, "grad_f")
    x = as_vector(x, "x")
    s = as_vector(s, "s")
    c_val = as_vector(c_val, "c_val")
    jac = as_matrix(jac, "jac")
    hess_l = as_matrix(hess_l, "hess_l")
    _check_nlp_dims(grad_f, x, s, c_val, jac)
    if zeta < 0.0:
        raise ValueError("zeta must be nonnegative")
    a = as_vector(a, "a")
    if a.shape != s.shape:
        raise DimensionMismatch("a has shape %s, expected %s" % (a.shape, s.shape))
    if np.any(a < 0.0):
        raise ValueError("a must be nonnegative")

    eps_foc = float(np.linalg.norm(grad_f - jac.T @ s))
    eps_pf = float(max(0.0, -c_val.min())) if c_val.size else 0.0
    eps_cs = float(np.linalg.norm(s * c_val))
    eps_pd = float(max(0.0, -(s + a * c_val).min())) if s.size else 0.0

    active = c_val <= zeta
    if np.any(active):
        try:
            z = nullspace_basis(jac[active])
        except RankDeficient as exc:
            raise RankDeficientActiveJacobian(str(exc)) from exc
        if z.shape[1] == 0:
            eps_soc = 0.0
        else:
            eps_soc = max(0.0, -sym_eig_min(z.T @ hess_l @ z))
    else:
        eps_soc = max(0.0, -sym_eig_min(hess_l))
    return Nlp2nMeasures(eps_foc=eps_foc, eps_pf=eps_pf, eps_cs=eps_cs,
                         eps_pd=eps_pd, eps_soc=float(eps_soc),
                         zeta=float(zeta), a=a.copy())


def ssv_approx_2n_measure(grad_f, x, v, s, c_val, jac, hess_l):
    """Approximate measures for the squared-slack form c(x) = v * v, v free.

    eps1 is the stationarity residual over (x, v), eps2 the constraint
    violation ||c(x) - v*v||, and eps3 the negative curvature of the
    Lagrangian Hessian blockdiag(hess_l, 2 diag(s)) on the nullspace of
    [jac | -2 diag(v)].
    """
    grad_f = as_vector(grad_f, "grad_f")
    x = as_vector(x, "x")
    v = as_vector(v, "v")
    s = as_vector(s, "s")
    c_val = as_vector(c_val, "c_val")
    jac = as_matrix(jac, "jac")
    hess_l = as_matrix(hess_l, "hess_l")
    n, m = _check_nlp_dims(grad_f, x, s, c_val, jac)
    if v.shape != (m,):
        raise DimensionMismatch("v has shape %s, expected (%d,)" % (v.shape, m))

    grad_lag = grad_f - jac.T @ s
    eps1 = float(np.sqrt(np.linalg.norm(grad_lag) ** 2
                         + np.linalg.norm(2.0 * s * v) ** 2))
    eps2 = float(np.linalg.norm(c_val - v * v))

    jssv = np.hstack([jac, np.diag(-2.0 * v)])
    basis = nullspace_basis(jssv)
    if basis.shape[1] == 0:
        eps3 = 0.0
    else:
        w_part = basis[:n]
        z_part = basis[n:]
        reduced = (w_part.T @ hess_l @ w_part
                   + z_part.T @ (2.0 * s[:, None] * z_part))
        eps3 = max(0.0, -sym_eig_min(reduced))
    return Ssv2nMeasures(eps1=eps1, eps2=eps2, eps3=float(eps3))


def thm35_transfer(x, v, s, c_val, jac, hess_l, eps1, eps2, eps3, zeta):
    """Transfer approximate squared-slack measures to the original problem.

    Given that (x, v, s) satisfies the squared-slack measures
    (eps1, eps2, eps3), each in (0, 1], and that zeta >= 2 * eps2 with the
    active rows of jac independent, returns measures certifying (x, s) for
    the original inequality form, together with the weight vector a built
    from rowwise pseudo-inverse solutions:

        eta_i = pinv(J_act) e_i,   xi_i = J_inact eta_i,
        a_i = 2 max(0, eta_i' hess_l eta_i)   (a_i = 0 off the active set).

    Raises OutOfRange when a measure leaves (0, 1] and HypothesisViolated
    when zeta < 2 * eps2 or the active rows are dependent.
    """
    x = as_vector(x, "x")
    v = as_vector(v, "v")
    s = as_vector(s, "s")
    c_val = as_vector(c_val, "c_val")
    jac = as_matrix(jac, "jac")
    hess_l = as_matrix(hess_l, "hess_l")
    m = c_val.size
    for val, name in ((eps1, "eps1"), (eps2, "eps2"), (eps3, "eps3")):
        if not 0.0 < val <= 1.0:
            raise OutOfRange("%s = %g is outside (0, 1]" % (name, val))
    if zeta < 2.0 * eps2:
        raise HypothesisViolated("zeta = %g is below 2 * eps2 = %g"
                                 % (zeta, 2.0 * eps2))

    active = c_val <= zeta
    j_act = jac[active]
    j_inact = jac[~active]
    n_act = j_act.shape[0]

    a_full = np.zeros(m)
    pd_terms = []
    if np.any(~active):
        pd_terms.append(eps1 / np.sqrt(2.0 * zeta))
    if n_act > 0:
        q, r = np.linalg.qr(j_act.T)
        jnorm = np.linalg.norm(jac)
        if jnorm == 0.0 or np.min(np.abs(np.diagonal(r))) < 1e-10 * jnorm:
            raise HypothesisViolated("active Jacobian rows are dependent")
        # J_act^T = Q R, so pinv(J_act) = Q R^-T; column i is eta_i
        eta = q @ solve_triangular(r.T, np.eye(n_act), lower=True)
        xi = j_inact @ eta
        eta_sq = np.sum(eta * eta, axis=0)
        xi_sq = np.sum(xi * xi, axis=0)
        quad = np.einsum("ji,jk,ki->i", eta, hess_l, eta)
        a_act = 2.0 * np.maximum(0.0, quad)
        a_full[active] = a_act
        c_inf = np.abs(c_val).max()
        pd_act = ((0.5 * eps3) * (4.0 * (c_inf + 1.0) * eta_sq + 1.0 + 3.0 * xi_sq)
                  + (3.0 * np.sqrt(2.0) * eps1 / (2.0 * np.sqrt(zeta)))
                  * np.maximum(xi_sq, 1.0)
                  + a_act * eps2)
        pd_terms.append(float(pd_act.max()))

    eps_cs = (0.5 * eps1 * float(np.sqrt(np.abs(c_val) + eps2).max())
              + eps2 * float(np.abs(s).max()))
    eps_pd = max(pd_terms) if pd_terms else 0.0
    if j_inact.size:
        inact_norm_sq = np.linalg.norm(j_inact, 2) ** 2
    else:
        inact_norm_sq = 0.0
    eps_soc = eps3 + inact_norm_sq * (2.0 * eps3 / zeta
                                      + np.sqrt(2.0) * eps1 / zeta ** 1.5)
    return Nlp2nMeasures(eps_foc=float(eps1), eps_pf=float(eps2),
                         eps_cs=float(eps_cs), eps_pd=float(eps_pd),
                         eps_soc=float(eps_soc), zeta=float(zeta), a=a_full)


# ---------------------------------------------------------------------------
# l1-regularized form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class L1StationarityReport:
    ssv_stationary: bool
    original_1p: bool


def l1dss_stationarity_check(h_grad, v_plus, v_minus, lam, tol=1e-8):
    """Stationarity correspondence for min h(x) + lam * ||x||_1.

    The split-square substitution is x = v_plus*v_plus - v_minus*v_minus
    with smooth objective h(x) + lam * (||v_plus||^2 + ||v_minus||^2).
    ssv_stationary reports whether its gradient norm is within tol;
    original_1p reports the subgradient conditions at x: h'_i = -lam where
    x_i > 0, h'_i = lam where x_i < 0, and |h'_i| <= lam where x_i = 0
    (entries within tol of zero use the interval case).
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    vp = as_vector(v_plus, "v_plus")
    vm = as_vector(v_minus, "v_minus")
    if vp.shape != vm.shape:
        raise DimensionMismatch("v_plus has shape %s, v_minus has shape %s"
                                % (vp.shape, vm.shape))
    x = vp * vp - vm * vm
    g = as_vector(h_grad(x), "h_grad(x)")
    if g.shape != x.shape:
        raise DimensionMismatch("h_grad returned shape %s, expected %s"
                                % (g.shape, x.shape))
    grad_p = 2.0 * vp * (g + lam)
    grad_m = 2.0 * vm * (lam - g)
    ssv_norm = np.sqrt(np.linalg.norm(grad_p) ** 2 + np.linalg.norm(grad_m) ** 2)

    pos = x > tol
    neg = x < -tol
    zero = ~pos & ~neg
    original = (np.all(np.abs(g[pos] + lam) <= tol)
                and np.all(np.abs(g[neg] - lam) <= tol)
                and np.all(np.abs(g[zero]) <= lam + tol))
    return L1StationarityReport(ssv_stationary=bool(ssv_norm <= tol),
                                original_1p=bool(original))
