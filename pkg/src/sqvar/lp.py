"""Interior-point and squared-variable SQP solvers for linear programs
with optional upper bounds:

    minimize c'x  subject to  Ax = b,  0 <= x_I <= u,  0 <= x_rest,

handled internally in the slack form Ax = b, x_I + w = u, (x, w) >= 0.
Three methods share the residual and step-length machinery: a plain
primal-dual interior-point step with fixed centering (pdip), Mehrotra
predictor-corrector (mpc), and an SQP on the squared-variable form
x = v * v, w = y * y (ssv). Each iteration reduces its Newton system to
the same augmented form [[-D, A'], [A, 0]] and recovers the remaining
blocks by substitution.
"""

import time
from dataclasses import dataclass

import numpy as np

from ._rng import philox_rng
from .core import RankDeficient, SingularSystem, as_matrix, as_vector, solve_augmented
from .report import SolveTrace

__all__ = [
    "LpProblem",
    "IpmIterate",
    "SsvIterate",
    "IpmDirection",
    "SsvDirection",
    "MpcDirection",
    "LpResiduals",
    "LpResult",
    "gen_random_lp",
    "init_iterate",
    "compute_residuals",
    "pdip_direction",
    "mpc_direction",
    "ssv_sqp_direction",
    "ratio_step",
    "lp_solve",
    "SOLVED",
    "ITER_LIMIT",
    "TIME_LIMIT",
    "DIVERGED",
]

SOLVED = "solved"
ITER_LIMIT = "iter_limit"
TIME_LIMIT = "time_limit"
DIVERGED = "diverged"

_DIVERGE_FACTOR = 1e6


@dataclass(frozen=True)
class LpProblem:
    """LP data with upper bounds u on the variables listed in upper_idx.

    upper_idx is stored sorted and duplicate-free; A must have full row
    rank (checked on construction, raising RankDeficient otherwise).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    upper_idx: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_vector(self.b, "b")
        c = as_vector(self.c, "c")
        m, n = a.shape
        if b.shape != (m,) or c.shape != (n,):
            raise ValueError("inconsistent LpProblem dimensions")
        idx = np.asarray(self.upper_idx, dtype=int).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("upper_idx out of range")
        if np.unique(idx).size != idx.size:
            raise ValueError("upper_idx has duplicates")
        order = np.argsort(idx)
        object.__setattr__(self, "upper_idx", idx[order])
        u = as_vector(self.u, "u")
        if u.shape != (idx.size,):
            raise ValueError("u must have one entry per upper_idx")
        if np.any(u <= 0.0):
            raise ValueError("upper bounds must be positive")
        object.__setattr__(self, "u", u[order])
        if np.linalg.matrix_rank(a) < m:
            raise RankDeficient("constraint matrix does not have full row rank")

    @property
    def n(self):
        return self.c.size

    @property
    def m(self):
        return self.b.size

    @property
    def free_idx(self):
        """Indices without an upper bound (complement of upper_idx)."""
        mask = np.ones(self.n, dtype=bool)
        mask[self.upper_idx] = False
        return np.flatnonzero(mask)


@dataclass
class IpmIterate:
    """Primal-dual point (x, w, lam, s, t); w and t are empty when the
    problem has no upper bounds. The interior-point methods keep x, w,
    s, t strictly positive; the ssv method keeps only s, t positive and
    lets x, w float (their negative parts enter the residual)."""

    x: np.ndarray
    w: np.ndarray
    lam: np.ndarray
    s: np.ndarray
    t: np.ndarray


@dataclass
class SsvIterate:
    """IpmIterate plus the square roots v (of x) and y (of w)."""

    base: IpmIterate
    v: np.ndarray
    y: np.ndarray


@dataclass
class IpmDirection:
    dx: np.ndarray
    dw: np.ndarray
    dlam: np.ndarray
    ds: np.ndarray
    dt: np.ndarray


@dataclass
class SsvDirection:
    dx: np.ndarray
    dw: np.ndarray
    dlam: np.ndarray
    ds: np.ndarray
    dt: np.ndarray
    dv: np.ndarray
    dy: np.ndarray


@dataclass
class MpcDirection:
    delta: IpmDirection
    sigma: float
    mu_aff: float


@dataclass(frozen=True)
class LpResiduals:
    """KKT residual blocks. r_cI / r_cIbar are the dual residuals
    for the bounded and unbounded variables, r_x the primal equality
    residual, r_u the bound-slack residual, r_xs and r_rw the
    complementarity products. res is the scalar stopping measure: the
    2-norm of all blocks plus the negative parts of x and w, divided by
    1 + max(||b||, ||c||)."""

    r_cI: np.ndarray
    r_cIbar: np.ndarray
    r_x: np.ndarray
    r_u: np.ndarray
    r_xs: np.ndarray
    r_rw: np.ndarray
    res: float


@dataclass
class LpResult:
    iterate: object
    status: str
    iterations: int
    res: float
    objective: float
    trace: SolveTrace
    detail: str = ""


# ---- generation and initialization ----

def gen_random_lp(n, m, seed):
    """Random feasible LP: A, c and a feasible point drawn i.i.d. uniform
    on [0,1] with b = A x_feas; floor(0.05 m) upper-bounded variables
    drawn without replacement, bounds uniform on [1, 21].
    """
    if n < 1 or m < 1 or m > n:
        raise ValueError("need 1 <= m <= n")
    rng = philox_rng(seed, stream=0)
    a = rng.uniform(0.0, 1.0, size=(m, n))
    c = rng.uniform(0.0, 1.0, size=n)
    x_feas = rng.uniform(0.0, 1.0, size=n)
    b = a @ x_feas
    k = int(0.05 * m)
    upper_idx = rng.choice(n, size=k, replace=False)
    u = rng.uniform(1.0, 21.0, size=k)
    return LpProblem(a=a, b=b, c=c, upper_idx=upper_idx, u=u)


def init_iterate(p, ssv=False):
    """Cold start: x = s = 100M 1_n, w = t = 100M 1_|I|, lam = 0, with
    M = max of the infinity norms of A, b, c; the ssv variant adds the
    elementwise square roots v, y.
    """
    m_scale = max(np.abs(p.a).sum(axis=1).max(), np.abs(p.b).max(),
                  np.abs(p.c).max())
    val = 100.0 * m_scale
    k = p.upper_idx.size
    it = IpmIterate(x=np.full(p.n, val), w=np.full(k, val),
                    lam=np.zeros(p.m), s=np.full(p.n, val),
                    t=np.full(k, val))
    if not ssv:
        return it
    return SsvIterate(base=it, v=np.sqrt(it.x), y=np.sqrt(it.w))


# ---- residuals ----

def compute_residuals(p, it):
    """KKT residual blocks and the scalar stopping measure at an iterate
    (IpmIterate or SsvIterate)."""
    base = it.base if isinstance(it, SsvIterate) else it
    x, w, lam, s, t = base.x, base.w, base.lam, base.s, base.t
    ui = p.upper_idx
    a_up = p.a[:, ui]
    free = p.free_idx
    r_cI = -(p.c[ui] - s[ui] + t - a_up.T @ lam)
    r_cIbar = -(p.c[free] - s[free] - p.a[:, free].T @ lam)
    r_x = p.a @ x - p.b
    r_u = x[ui] + w - p.u
    r_xs = x * s
    r_rw = t * w
    x_neg = np.minimum(x, 0.0)
    w_neg = np.minimum(w, 0.0)
    stack = np.concatenate([r_cI, r_cIbar, r_x, r_u, r_xs, r_rw,
                            x_neg, w_neg])
    res = float(np.linalg.norm(stack) / (1.0 + max(np.linalg.norm(p.b),
                                                   np.linalg.norm(p.c))))
    return LpResiduals(r_cI=r_cI, r_cIbar=r_cIbar, r_x=r_x,
                       r_u=r_u, r_xs=r_xs, r_rw=r_rw, res=res)


# ---- directions ----

def _ipm_core(p, it, r_xs, r_rw, solver_path):
    """Shared elimination for pdip and mpc: given the complementarity
    right-hand sides r_xs (for x s) and r_rw (for t w), reduce to the
    augmented system in (dx, dlam) and back-substitute dw, dt, ds."""
    x, w, lam, s, t = it.x, it.w, it.lam, it.s, it.t
    ui = p.upper_idx
    free = p.free_idx
    resid = compute_residuals(p, it)

    d = np.empty(p.n)
    d[ui] = s[ui] / x[ui] + t / w
    d[free] = s[free] / x[free]

    r_xwr = np.empty(p.n)
    r_xwr[ui] = (r_xs[ui] / x[ui] - r_rw / w + (t / w) * resid.r_u
                 - resid.r_cI)
    r_xwr[free] = r_xs[free] / x[free] - resid.r_cIbar

    dx, dlam = solve_augmented(d, p.a, r_xwr, -resid.r_x, path=solver_path)
    dw = -resid.r_u - dx[ui]
    ds = -(r_xs + s * dx) / x
    dt = -(r_rw + t * dw) / w
    return IpmDirection(dx=dx, dw=dw, dlam=dlam, ds=ds, dt=dt)


def pdip_direction(p, it, sigma, solver_path="normal"):
    """Newton step on the perturbed KKT system with centering sigma."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must be in [0, 1]")
    mu = _duality_mu(p, it)
    r_xs = it.x * it.s - sigma * mu
    r_rw = it.t * it.w - sigma * mu
    direction = _ipm_core(p, it, r_xs, r_rw, solver_path)
    if not _ipm_system_ok(p, it, direction, r_xs, r_rw):
        raise SingularSystem("direction lost accuracy beyond the "
                             "condition-scaled tolerance")
    return direction


def _duality_mu(p, it):
    k = p.upper_idx.size
    return float((it.x @ it.s + it.w @ it.t) / (p.n + k))


def _centering_sigma(mu_aff, mu):
    """(mu_aff / mu)^3 clamped to [0, 1]; mu_aff exceeds mu only through
    roundoff or a badly infeasible start, and a negative mu_aff (possible
    since the affine trial point is not forced to stay nonnegative in
    exact complementarity terms) means no centering is needed."""
    if mu <= 0.0:
        return 0.0
    return min(1.0, max(0.0, (mu_aff / mu) ** 3))


def mpc_direction(p, it, corrector="mehrotra", solver_path="normal"):
    """Predictor-corrector direction: affine step (sigma = 0), duality
    gap after the largest feasible affine step, then a corrector solve
    with sigma = (mu_aff / mu)^3. The default corrector adds the
    classical second-order products from the affine direction to the
    complementarity right-hand side; corrector="plain" re-solves with
    the new sigma only, which costs about a third more iterations on
    random instances."""
    if corrector not in ("mehrotra", "plain"):
        raise ValueError("corrector must be 'mehrotra' or 'plain'")
    mu = _duality_mu(p, it)
    aff = pdip_direction(p, it, sigma=0.0, solver_path=solver_path)
    alpha_p = ratio_step(np.concatenate([it.x, it.w]),
                         np.concatenate([aff.dx, aff.dw]), tau=1.0)
    alpha_d = ratio_step(np.concatenate([it.s, it.t]),
                         np.concatenate([aff.ds, aff.dt]), tau=1.0)
    x_a = it.x + alpha_p * aff.dx
    w_a = it.w + alpha_p * aff.dw
    s_a = it.s + alpha_d * aff.ds
    t_a = it.t + alpha_d * aff.dt
    k = p.upper_idx.size
    mu_aff = float((x_a @ s_a + w_a @ t_a) / (p.n + k))
    sigma = _centering_sigma(mu_aff, mu)
    r_xs = it.x * it.s - sigma * mu
    r_rw = it.t * it.w - sigma * mu
    if corrector == "mehrotra":
        r_xs = r_xs + aff.dx * aff.ds
        r_rw = r_rw + aff.dt * aff.dw
    delta = _ipm_core(p, it, r_xs, r_rw, solver_path)
    if not _ipm_system_ok(p, it, delta, r_xs, r_rw):
        raise SingularSystem("direction lost accuracy beyond the "
                             "condition-scaled tolerance")
    return MpcDirection(delta=delta, sigma=sigma, mu_aff=mu_aff)


def ssv_sqp_direction(p, it, solver_path="normal"):
    """SQP step on the squared-variable KKT system: eliminates
    (dv, dy, ds, dt, dw) to the same augmented form, then recovers them.
    Requires v, y, s, t strictly positive."""
    base, v, y = it.base, it.v, it.y
    x, w, lam, s, t = base.x, base.w, base.lam, base.s, base.t
    ui = p.upper_idx
    free = p.free_idx
    resid = compute_residuals(p, it)
    r_sv = v * s
    r_ty = t * y
    r_v = x - v * v
    r_y = w - y * y

    half_vs = 0.5 * s / (v * v)
    half_yt = 0.5 * t / (y * y)
    d = np.empty(p.n)
    d[ui] = half_vs[ui] + half_yt
    d[free] = half_vs[free]

    r_vwr = np.empty(p.n)
    r_vwr[ui] = (r_sv[ui] / v[ui] - r_ty / y + half_vs[ui] * r_v[ui]
                 - half_yt * r_y + half_yt * resid.r_u - resid.r_cI)
    r_vwr[free] = (r_sv[free] / v[free] + half_vs[free] * r_v[free]
                   - resid.r_cIbar)

    dx, dlam = solve_augmented(d, p.a, r_vwr, -resid.r_x, path=solver_path)
    dv = 0.5 * (dx + r_v) / v
    dw = -resid.r_u - dx[ui]
    dy = 0.5 * (dw + r_y) / y
    ds = -(r_sv + s * dv) / v
    dt = -(r_ty + t * dy) / y
    direction = SsvDirection(dx=dx, dw=dw, dlam=dlam, ds=ds, dt=dt,
                             dv=dv, dy=dy)
    if not _ssv_system_ok(p, it, direction, r_sv, r_ty, r_v, r_y):
        raise SingularSystem("direction lost accuracy beyond the "
                             "condition-scaled tolerance")
    return direction


def ratio_step(pos, delta, tau):
    """tau times the largest alpha in [0, 1] keeping pos + alpha delta
    nonnegative; pos must be strictly positive."""
    pos = as_vector(pos, "pos")
    delta = as_vector(delta, "delta")
    if pos.shape != delta.shape:
        raise ValueError("pos and delta must have the same length")
    if pos.size and pos.min() <= 0.0:
        raise ValueError("pos must be strictly positive")
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    neg = delta < 0.0
    if not neg.any():
        return tau
    alpha_max = min(1.0, float(np.min(-pos[neg] / delta[neg])))
    return tau * alpha_max


# ---- substitution checks (stripped under python -O) ----

def _blocks_ok(parts, tol):
    """Each entry of parts is a list of same-length vectors whose sum
    should vanish. Checks every block to tol relative to its own term
    magnitudes. The dual rows are passed with the back-substitution
    expressions for the eliminated variables expanded, because those
    expressions cancel almost exactly near convergence: the roundoff in
    the recovered vectors is eps times the pre-cancellation scale, and
    judging the row against the smaller post-cancellation terms would
    reject directions that are correct to working precision.
    """
    for terms in parts:
        err = np.linalg.norm(sum(terms))
        scale = sum(np.linalg.norm(t) for t in terms)
        if err > tol * (1.0 + scale):
            return False
    return True


def _cond_tol(d, tol):
    """Substitution tolerance no tighter than the reduced system allows.

    The forward error of the solve grows like eps times the condition
    number of the reduced matrix, and the diagonal spread of D dominates
    that condition number near convergence (it is unbounded in the
    limit). Below the spread where eps * cond reaches tol the check runs
    at the full tol; beyond it the requirement tracks what float64 can
    actually deliver instead of failing on roundoff.
    """
    spread = float(d.max() / d.min()) if d.size else 1.0
    return max(tol, 100.0 * np.finfo(float).eps * spread)


def _ipm_system_ok(p, it, d, r_xs, r_rw, tol=1e-8):
    ui = p.upper_idx
    free = p.free_idx
    resid = compute_residuals(p, it)
    sx = it.s / it.x
    diag = sx.copy()
    diag[ui] += it.t / it.w
    tol = _cond_tol(diag, tol)
    parts = [
        [p.a[:, ui].T @ d.dlam, -r_xs[ui] / it.x[ui], -sx[ui] * d.dx[ui],
         r_rw / it.w, (it.t / it.w) * d.dw, resid.r_cI],
        [p.a[:, free].T @ d.dlam, -r_xs[free] / it.x[free],
         -sx[free] * d.dx[free], resid.r_cIbar],
        [p.a @ d.dx, resid.r_x],
        [d.dx[ui], d.dw, resid.r_u],
        [it.x * d.ds, it.s * d.dx, r_xs],
        [it.w * d.dt, it.t * d.dw, r_rw],
    ]
    return _blocks_ok(parts, tol)


def _ssv_system_ok(p, it, d, r_sv, r_ty, r_v, r_y, tol=1e-8):
    base, v, y = it.base, it.v, it.y
    ui = p.upper_idx
    free = p.free_idx
    resid = compute_residuals(p, it)
    sv = base.s / v
    diag = 0.5 * base.s / (v * v)
    diag[ui] = diag[ui] + 0.5 * base.t / (y * y)
    tol = _cond_tol(diag, tol)
    parts = [
        [p.a[:, ui].T @ d.dlam, -r_sv[ui] / v[ui], -sv[ui] * d.dv[ui],
         r_ty / y, (base.t / y) * d.dy, resid.r_cI],
        [p.a[:, free].T @ d.dlam, -r_sv[free] / v[free],
         -sv[free] * d.dv[free], resid.r_cIbar],
        [p.a @ d.dx, resid.r_x],
        [d.dx[ui], d.dw, resid.r_u],
        [v * d.ds, base.s * d.dv, r_sv],
        [y * d.dt, base.t * d.dy, r_ty],
        [d.dx, -2.0 * v * d.dv, r_v],
        [d.dw, -2.0 * y * d.dy, r_y],
    ]
    return _blocks_ok(parts, tol)


# ---- driver ----

_TRACE_BASE = ("iter", "res", "mu", "alpha_p", "alpha_d")

_DEFAULT_TAU = {"pdip": 0.9, "mpc": 0.995, "ssv": 0.5}
_PDIP_SIGMA = 0.1


def lp_solve(p, method="mpc", tau=None, eps=1e-8, max_iter=500,
             max_seconds=750.0, corrector="mehrotra", solver_path="normal",
             reset_squares=False):
    """Run one of the three methods until res <= eps, an iteration or
    wall-clock limit, or divergence (res exceeding 1e6 times its best
    value, or a singular reduced system).

    tau defaults per method (pdip 0.9, mpc 0.995, ssv 0.5). For ssv the
    primal ratio test is taken over (v, y) and x, w are stepped along
    their own direction components; reset_squares=True instead
    recomputes x = v * v and w = y * y after every step.
    """
    if method not in _DEFAULT_TAU:
        raise ValueError("method must be one of 'pdip', 'mpc', 'ssv'")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if tau is None:
        tau = _DEFAULT_TAU[method]
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")

    ssv = method == "ssv"
    it = init_iterate(p, ssv=ssv)
    base = it.base if ssv else it
    columns = _TRACE_BASE + ("sigma",) if method == "mpc" else _TRACE_BASE
    trace = SolveTrace(columns)
    start = time.monotonic()
    res = compute_residuals(p, it).res
    best = res
    if method == "mpc":
        trace.append(0, res, _duality_mu(p, base), 0.0, 0.0, 0.0)
    else:
        trace.append(0, res, _duality_mu(p, base), 0.0, 0.0)

    k = 0
    status = ITER_LIMIT
    detail = ""
    while True:
        if res <= eps:
            status = SOLVED
            break
        if k >= max_iter:
            status = ITER_LIMIT
            break
        if time.monotonic() - start > max_seconds:
            status = TIME_LIMIT
            break
        if res > _DIVERGE_FACTOR * best:
            status = DIVERGED
            detail = "residual grew to %g from best %g" % (res, best)
            break
        sigma_used = None
        try:
            if method == "pdip":
                direction = pdip_direction(p, base, _PDIP_SIGMA,
                                           solver_path=solver_path)
            elif method == "mpc":
                mpc = mpc_direction(p, base, corrector=corrector,
                                    solver_path=solver_path)
                direction = mpc.delta
                sigma_used = mpc.sigma
            else:
                direction = ssv_sqp_direction(p, it,
                                              solver_path=solver_path)
        except SingularSystem as exc:
            status = DIVERGED
            detail = "singular reduced system: %s" % exc
            break

        if ssv:
            alpha_p = ratio_step(np.concatenate([it.v, it.y]),
                                 np.concatenate([direction.dv,
                                                 direction.dy]), tau)
        else:
            alpha_p = ratio_step(np.concatenate([base.x, base.w]),
                                 np.concatenate([direction.dx,
                                                 direction.dw]), tau)
        alpha_d = ratio_step(np.concatenate([base.s, base.t]),
                             np.concatenate([direction.ds,
                                             direction.dt]), tau)

        base.x = base.x + alpha_p * direction.dx
        base.w = base.w + alpha_p * direction.dw
        base.lam = base.lam + alpha_d * direction.dlam
        base.s = base.s + alpha_d * direction.ds
        base.t = base.t + alpha_d * direction.dt
        if ssv:
            it.v = it.v + alpha_p * direction.dv
            it.y = it.y + alpha_p * direction.dy
            if reset_squares:
                base.x = it.v * it.v
                base.w = it.y * it.y

        k += 1
        res = compute_residuals(p, it).res
        best = min(best, res)
        mu = _duality_mu(p, base)
        if method == "mpc":
            trace.append(k, res, mu, alpha_p, alpha_d, sigma_used)
        else:
            trace.append(k, res, mu, alpha_p, alpha_d)

    objective = float(p.c @ base.x)
    return LpResult(iterate=it, status=status, iterations=k, res=res,
                    objective=objective, trace=trace, detail=detail)
