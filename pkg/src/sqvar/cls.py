"""Pseudo-norm constrained least squares through power variables.

The target problem is min ||A x - b||^2 / 2 subject to a tau pseudo-norm
budget sum_i |x_i|^tau <= R. Writing x = v**p - w**p elementwise turns
the budget into a set that is cheap to project onto: with tau = 1 and
squares (p = 2) the feasible (v, w) region is the Euclidean ball of
radius sqrt(R), and with tau = 1/L for even L the power-L substitution
gives the l1 ball of radius R over the stacked 2n-vector. Each stage is
solved by projected gradient with an Armijo line search, and a
continuation loop carries the represented x from one tau to the next.
"""

from dataclasses import dataclass

import numpy as np

from ._rng import philox_rng
from .core import as_matrix, as_vector

__all__ = [
    "ClsProblem",
    "TauStage",
    "PgResult",
    "StageReport",
    "DEFAULT_TAUS",
    "gen_cls",
    "tau_stage",
    "project_l1_ball",
    "project_l2_ball",
    "power_value_grad",
    "pg_armijo_solve",
    "continuation_solve",
]

DEFAULT_TAUS = (1.0, 1.0 / 2.0, 1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0)

_ARMIJO = 1e-4
_SHRINK = 0.5
_PROX_TOL = 1e-6
_ALPHA_FLOOR = 1e-20
_FEAS_SLACK = 1e-9


# ---------------------------------------------------------------------------
# problem containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClsProblem:
    """Sparse-recovery least squares data with its reference solution.

    b was produced as a @ beta0 plus centered noise of deviation sigma;
    seed records the draw so a problem can be regenerated exactly.
    """

    a: np.ndarray
    b: np.ndarray
    beta0: np.ndarray
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_vector(self.b, "b")
        beta0 = as_vector(self.beta0, "beta0")
        if b.shape[0] != a.shape[0]:
            raise ValueError("b has length %d, expected %d" % (b.shape[0], a.shape[0]))
        if beta0.shape[0] != a.shape[1]:
            raise ValueError("beta0 has length %d, expected %d"
                             % (beta0.shape[0], a.shape[1]))
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "beta0", beta0)

    @property
    def n(self):
        return self.a.shape[1]

    @property
    def m(self):
        return self.a.shape[0]


@dataclass(frozen=True)
class TauStage:
    """One continuation stage: the exponent denominator and its budget.

    tau is 1 or 1/l for an even integer l; r is the pseudo-norm budget
    sum_i |x_i|^tau the stage enforces.
    """

    tau: float
    l: int
    r: float

    def __post_init__(self):
        if self.l != int(self.l) or self.l < 1:
            raise ValueError("l must be a positive integer")
        object.__setattr__(self, "l", int(self.l))
        if self.l != 1 and self.l % 2 != 0:
            raise ValueError("l must be 1 or an even integer, got %d" % self.l)
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if abs(self.tau - 1.0 / self.l) > 1e-9:
            raise ValueError("tau is %g but 1/l is %g" % (self.tau, 1.0 / self.l))
        if not self.r > 0.0:
            raise ValueError("r must be positive")

    def power(self):
        """Exponent of the substitution x = v**p - w**p for this stage.

        tau = 1 uses squares: sum(v**2) + sum(w**2) <= r is then the
        Euclidean ball of radius sqrt(r) over (v, w). Every other tau
        uses p = l, with the l1 ball of radius r over (v, w).
        """
        return 2 if self.l == 1 else self.l


def tau_stage(beta0, tau):
    """Stage for the given tau with the budget taken from beta0."""
    beta0 = as_vector(beta0, "beta0")
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must lie in (0, 1]")
    l = 1 if tau == 1.0 else int(round(1.0 / tau))
    if abs(tau * l - 1.0) > 1e-9 or (l != 1 and l % 2 != 0):
        raise ValueError("tau must be 1 or 1/L for an even integer L, got %g" % tau)
    r = float(np.sum(np.abs(beta0) ** tau))
    return TauStage(tau=float(tau), l=l, r=r)


# ---------------------------------------------------------------------------
# ball projections
# ---------------------------------------------------------------------------

def project_l1_ball(z, radius):
    """Euclidean projection onto the l1 ball of the given radius.

    Sort and threshold: outside the ball the projection soft-thresholds
    z at the level that lands the result exactly on the boundary.
    """
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    z = as_vector(z, "z")
    mag = np.abs(z)
    if mag.sum() <= radius:
        return z.copy()
    drop = np.sort(mag)[::-1]
    cum = np.cumsum(drop)
    keep = drop * np.arange(1, z.size + 1) > cum - radius
    k = np.nonzero(keep)[0][-1]
    level = (cum[k] - radius) / (k + 1.0)
    return np.sign(z) * np.maximum(mag - level, 0.0)


def project_l2_ball(z, radius):
    """Euclidean projection onto the l2 ball: rescale iff outside."""
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    z = as_vector(z, "z")
    nrm = np.linalg.norm(z)
    if nrm <= radius:
        return z.copy()
    return z * (radius / nrm)


def _stage_project(stage, z):
    if stage.l == 1:
        return project_l2_ball(z, np.sqrt(stage.r))
    return project_l1_ball(z, stage.r)


def _stage_violation(stage, z):
    if stage.l == 1:
        return np.linalg.norm(z) - np.sqrt(stage.r)
    return np.abs(z).sum() - stage.r


# ---------------------------------------------------------------------------
# stage objective
# ---------------------------------------------------------------------------

def power_value_grad(p, v, w, l):
    """Value and gradient of g(v, w) = ||A(v**l - w**l) - b||^2 / 2."""
    l = int(l)
    if l < 1:
        raise ValueError("l must be at least 1")
    v = as_vector(v, "v")
    w = as_vector(w, "w")
    if v.shape != (p.n,) or w.shape != (p.n,):
        raise ValueError("v and w must have length %d" % p.n)
    resid = p.a @ (v ** l - w ** l) - p.b
    atr = p.a.T @ resid
    gv = l * v ** (l - 1) * atr
    gw = -l * w ** (l - 1) * atr
    return 0.5 * float(resid @ resid), gv, gw


def _power_value(p, v, w, l):
    resid = p.a @ (v ** l - w ** l) - p.b
    return 0.5 * float(resid @ resid)


# ---------------------------------------------------------------------------
# projected gradient with Armijo backtracking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PgResult:
    v: np.ndarray
    w: np.ndarray
    iterations: int


def pg_armijo_solve(p, stage, v0, w0, max_iter=200):
    """One continuation stage by projected gradient on the stage ball.

    The step candidate is the projection of z - alpha * grad with alpha
    halved from 1 until the objective drops by at least 1e-4 times the
    gradient-times-displacement product. Stops when the unit-step
    proximity measure ||z - P[z - grad]||_2 falls to 1e-6 or after
    max_iter accepted steps; hitting the cap is a normal exit.
    """
    n = p.n
    v = as_vector(v0, "v0")
    w = as_vector(w0, "w0")
    if v.shape != (n,) or w.shape != (n,):
        raise ValueError("v0 and w0 must have length %d" % n)
    z = np.concatenate([v, w])
    scale = max(1.0, stage.r)
    if _stage_violation(stage, z) > _FEAS_SLACK * scale:
        raise ValueError("starting point lies outside the stage ball")
    power = stage.power()
    for k in range(max_iter):
        g0, gv, gw = power_value_grad(p, z[:n], z[n:], power)
        grad = np.concatenate([gv, gw])
        trial = _stage_project(stage, z - grad)
        if np.linalg.norm(z - trial) <= _PROX_TOL:
            return PgResult(v=z[:n].copy(), w=z[n:].copy(), iterations=k)
        alpha = 1.0
        while True:
            g_trial = _power_value(p, trial[:n], trial[n:], power)
            if g_trial <= g0 - _ARMIJO * float(grad @ (z - trial)):
                break
            alpha *= _SHRINK
            if alpha < _ALPHA_FLOOR:
                # rounding has exhausted the descent direction short of
                # the proximity tolerance; stop at the current point
                return PgResult(v=z[:n].copy(), w=z[n:].copy(), iterations=k)
            trial = _stage_project(stage, z - alpha * grad)
        z = trial
    return PgResult(v=z[:n].copy(), w=z[n:].copy(), iterations=max_iter)


# ---------------------------------------------------------------------------
# warm-started continuation over tau
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StageReport:
    tau: float
    iterations: int
    objective_ratio: float
    recovery_error: float


def _warm_start(x, stage):
    """Map a represented x into the stage's (v, w) parametrization.

    The positive and negative parts of x are raised to 1/power so that
    v**power - w**power reproduces x exactly, then the stacked vector
    is projected onto the stage ball (which moves it only when the
    carried x is infeasible for the new budget).
    """
    x = as_vector(x, "x")
    root = np.abs(x) ** (1.0 / stage.power())
    v = np.where(x > 0.0, root, 0.0)
    w = np.where(x < 0.0, root, 0.0)
    z = _stage_project(stage, np.concatenate([v, w]))
    return z[: x.size], z[x.size:]


def continuation_solve(p, taus=DEFAULT_TAUS, max_iter=200):
    """Solve a decreasing tau schedule, warm starting each stage.

    The first stage starts from a standard-normal 2n-vector projected
    onto its ball; each later stage starts from the previous stage's
    represented x re-parametrized for the new exponent. Returns one
    StageReport per tau with the iteration count, g / ||b||^2, and
    ||x - beta0|| / ||beta0|| at termination.
    """
    taus = tuple(float(t) for t in taus)
    if not taus:
        raise ValueError("taus must be nonempty")
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValueError("taus must be strictly decreasing")
    beta_norm = np.linalg.norm(p.beta0)
    if beta_norm == 0.0:
        raise ValueError("beta0 is identically zero")
    b_sq = float(p.b @ p.b)
    reports = []
    x = None
    for i, tau in enumerate(taus):
        stage = tau_stage(p.beta0, tau)
        if i == 0:
            rng = philox_rng(p.seed, 1)
            z0 = _stage_project(stage, rng.standard_normal(2 * p.n))
            v, w = z0[: p.n], z0[p.n:]
        else:
            v, w = _warm_start(x, stage)
        got = pg_armijo_solve(p, stage, v, w, max_iter=max_iter)
        power = stage.power()
        x = got.v ** power - got.w ** power
        reports.append(StageReport(
            tau=stage.tau,
            iterations=got.iterations,
            objective_ratio=_power_value(p, got.v, got.w, power) / b_sq,
            recovery_error=float(np.linalg.norm(x - p.beta0)) / beta_norm,
        ))
    return tuple(reports)


# ---------------------------------------------------------------------------
# instance generator
# ---------------------------------------------------------------------------

def gen_cls(n=1000, m=207, s=5, sigma=1.0, seed=0):
    """Random sparse-recovery instance b = A beta0 + noise.

    A is i.i.d. standard normal, beta0 has s nonzeros on a uniformly
    drawn support with values uniform on [-1, 1], and the noise is
    centered normal with deviation sigma.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if not 1 <= s <= n:
        raise ValueError("s must lie in [1, n]")
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    rng = philox_rng(seed, 0)
    a = rng.standard_normal((m, n))
    beta0 = np.zeros(n)
    support = rng.choice(n, size=s, replace=False)
    beta0[support] = rng.uniform(-1.0, 1.0, size=s)
    b = a @ beta0 + sigma * rng.standard_normal(m)
    return ClsProblem(a=a, b=b, beta0=beta0, sigma=float(sigma), seed=int(seed))
