"""Command-line harness: problem generation, single solves, certificate
checks, and seed sweeps with deterministic CSV/JSON reports.

Subcommands: qp, lp-random, solve-mps, nmf, cls, check-kkt, bench-all.
Reports are written with 17 significant digits so a fixed configuration
and seed list produce byte-identical files, single- or multi-threaded;
wall-clock numbers are therefore never part of a report. The effective
configuration (all defaults resolved) is echoed as '# key=value' lines
on stdout, never into the report body.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bcqp, cls, lp, mps, nmf, optcert
from .core import NotSymmetric, RankDeficient, SingularSystem
from .report import rows_to_string, write_rows

__all__ = [
    "ExperimentConfig",
    "ReportBundle",
    "run_experiment",
    "emit_report",
    "parse_seeds",
    "parse_taus",
    "build_parser",
    "main",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "EXIT_SOLVER",
]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3

FAMILIES = ("qp", "lp-random", "lp-mps", "nmf", "cls", "check")

_QP_METHODS = ("pg", "dss-scaled", "both")
_CORRECTORS = {"paper": "plain", "mehrotra": "mehrotra"}


class SolverFailure(RuntimeError):
    """No run in the experiment produced a usable result."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    n: int = None
    m: int = None
    r: int = None
    s: int = None
    kappa: float = None
    sigma: float = None
    method: str = None
    variant: str = None
    tau: float = None
    taus: tuple = None
    eps: float = None
    tol: float = None
    max_iter: int = None
    max_seconds: float = None
    zeta: float = None
    seeds: tuple = (0,)
    path: str = None
    out: str = None
    fmt: str = "csv"
    solver_path: str = "normal"
    mpc_corrector: str = "mehrotra"

    def validate(self):
        if self.family not in FAMILIES:
            raise ValueError("unknown family %r" % (self.family,))
        if not self.seeds:
            raise ValueError("seed list must be nonempty")
        for seed in self.seeds:
            if seed != int(seed) or seed < 0:
                raise ValueError("seeds must be nonnegative integers")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seed list contains duplicates")
        if self.eps is not None and not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if self.tol is not None and not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.solver_path not in ("normal", "augmented"):
            raise ValueError("solver-path must be normal or augmented")
        if self.mpc_corrector not in _CORRECTORS:
            raise ValueError("mpc-corrector must be paper or mehrotra")
        return self


@dataclass(frozen=True)
class ReportBundle:
    columns: tuple
    rows: tuple
    header_lines: tuple
    exit_code: int = EXIT_OK


def emit_report(columns, rows, fmt, out=None):
    """Render rows as CSV or JSON text; also write the file when out is
    given. Numbers carry 17 significant digits either way."""
    text = rows_to_string(columns, rows, fmt)
    if out is not None:
        write_rows(out, columns, rows, fmt)
    return text


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def parse_seeds(text):
    """Seed list syntax: comma-separated integers and inclusive ranges,
    e.g. '0-9' or '1,2,5' or '0-3,7'."""
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, _, hi = part.partition("-")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError("seed range %r is reversed" % part)
            seeds.extend(range(lo, hi + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("seed list must be nonempty")
    if any(s < 0 for s in seeds):
        raise ValueError("seeds must be nonnegative integers")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seed list contains duplicates")
    return tuple(seeds)


def parse_taus(text):
    """Tau schedule syntax: comma-separated values, each a decimal or a
    fraction like 1/6."""
    taus = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "/" in part:
            num, _, den = part.partition("/")
            taus.append(float(num) / float(den))
        else:
            taus.append(float(part))
    if not taus:
        raise ValueError("tau schedule must be nonempty")
    return tuple(taus)


def _worker_count(n_jobs):
    cap = os.environ.get("SQVAR_THREADS", "").strip()
    if cap:
        try:
            cap_val = int(cap)
        except ValueError:
            raise ValueError("SQVAR_THREADS must be an integer")
        if cap_val < 1:
            raise ValueError("SQVAR_THREADS must be at least 1")
    else:
        cap_val = os.cpu_count() or 1
    return max(1, min(n_jobs, cap_val))


def _run_seeded(fn, seeds):
    """Run fn over seeds, possibly on a thread pool; result order always
    matches the seed order, so output bytes do not depend on timing."""
    workers = _worker_count(len(seeds))
    if workers == 1:
        return [fn(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


def _mean_std(values):
    vals = [float(v) for v in values]
    if not vals:
        return float("nan"), float("nan")
    mean = float(np.mean(vals))
    std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
    return mean, std


def _header(pairs):
    return "# " + " ".join("%s=%s" % (k, v) for k, v in pairs)


# ---------------------------------------------------------------------------
# family runners
# ---------------------------------------------------------------------------

def _run_qp(cfg):
    methods = ("pg", "dss-scaled") if cfg.method == "both" else (cfg.method,)

    def one(seed):
        p = bcqp.gen_qp(cfg.n, cfg.kappa, seed)
        x0, v0 = bcqp.standard_init(cfg.n, seed)
        out = {}
        for name in methods:
            if name == "pg":
                out[name] = bcqp.pg_solve(p, x0, cfg.tol, max_iter=cfg.max_iter)
            else:
                out[name] = bcqp.dss_gd_scaled_solve(p, v0, cfg.tol,
                                                     max_iter=cfg.max_iter)
        return seed, out

    results = sorted(_run_seeded(one, cfg.seeds))
    columns = ("family", "method", "n", "kappa", "tol", "seeds",
               "n_converged", "mean_iterations", "std_iterations")
    rows = []
    means = {}
    for name in methods:
        iters = [out[name].iterations for _, out in results
                 if out[name].converged]
        if not iters:
            raise SolverFailure("qp method %s converged on no seed" % name)
        mean, std = _mean_std(iters)
        means[name] = mean
        rows.append(("qp", name, cfg.n, cfg.kappa, cfg.tol, len(cfg.seeds),
                     len(iters), mean, std))
    header = [_header([("family", "qp"), ("n", cfg.n), ("kappa", cfg.kappa),
                       ("tol", cfg.tol), ("max_iter", cfg.max_iter),
                       ("seeds", len(cfg.seeds)), ("format", cfg.fmt)])]
    if len(methods) == 2:
        header.append("# ratio mean dss-scaled / mean pg = %.6f"
                      % (means["dss-scaled"] / means["pg"]))
    return ReportBundle(tuple(columns), tuple(rows), tuple(header))


def _run_lp_random(cfg):
    corrector = _CORRECTORS[cfg.mpc_corrector]
    tau_eff = cfg.tau if cfg.tau is not None else lp._DEFAULT_TAU[cfg.method]

    def one(seed):
        p = lp.gen_random_lp(cfg.n, cfg.m, seed)
        res = lp.lp_solve(p, method=cfg.method, tau=cfg.tau, eps=cfg.eps,
                          max_iter=cfg.max_iter, max_seconds=cfg.max_seconds,
                          corrector=corrector, solver_path=cfg.solver_path)
        return seed, res

    results = sorted(_run_seeded(one, cfg.seeds))
    solved = [res.iterations for _, res in results if res.status == lp.SOLVED]
    if not solved:
        raise SolverFailure("lp method %s solved no seed at (%d, %d)"
                            % (cfg.method, cfg.n, cfg.m))
    mean, std = _mean_std(solved)
    columns = ("family", "method", "n", "m", "tau", "eps", "seeds",
               "n_solved", "mean_iterations", "std_iterations")
    rows = (("lp-random", cfg.method, cfg.n, cfg.m, tau_eff, cfg.eps,
             len(cfg.seeds), len(solved), mean, std),)
    header = (_header([("family", "lp-random"), ("method", cfg.method),
                       ("n", cfg.n), ("m", cfg.m), ("tau", tau_eff),
                       ("eps", cfg.eps), ("max_iter", cfg.max_iter),
                       ("max_seconds", cfg.max_seconds),
                       ("corrector", cfg.mpc_corrector),
                       ("solver_path", cfg.solver_path),
                       ("seeds", len(cfg.seeds)), ("format", cfg.fmt)]),)
    return ReportBundle(columns, rows, header)


def _run_solve_mps(cfg):
    with open(cfg.path) as fh:
        general = mps.parse_mps(fh.read())
    problem, fmap = mps.to_lp_u(general)
    corrector = _CORRECTORS[cfg.mpc_corrector]
    tau_eff = cfg.tau if cfg.tau is not None else lp._DEFAULT_TAU[cfg.method]
    res = lp.lp_solve(problem, method=cfg.method, tau=cfg.tau, eps=cfg.eps,
                      max_iter=cfg.max_iter, max_seconds=cfg.max_seconds,
                      corrector=corrector, solver_path=cfg.solver_path)
    objective = res.objective + fmap.objective_constant
    header = (
        _header([("family", "lp-mps"), ("file", cfg.path),
                 ("name", general.name), ("rows", problem.m),
                 ("cols", problem.n), ("method", cfg.method),
                 ("tau", tau_eff), ("eps", cfg.eps),
                 ("max_iter", cfg.max_iter),
                 ("max_seconds", cfg.max_seconds),
                 ("corrector", cfg.mpc_corrector),
                 ("solver_path", cfg.solver_path), ("format", cfg.fmt)]),
        "# status=%s iterations=%d res=%.6e objective=%.10g"
        % (res.status, res.iterations, res.res, objective),
    )
    exit_code = EXIT_OK if res.status == lp.SOLVED else EXIT_SOLVER
    return ReportBundle(tuple(res.trace.columns), tuple(res.trace.rows),
                        header, exit_code=exit_code)


def _run_nmf(cfg):
    def one(seed):
        p = nmf.gen_nmf(cfg.n, cfg.r, seed)
        try:
            got = nmf.nmf_solve(p, variant=cfg.variant, eps=cfg.eps,
                                max_iter=cfg.max_iter, seed=seed)
            return seed, got.iterations, got.acc, True
        except nmf.MaxIterReached:
            return seed, cfg.max_iter, float("nan"), False

    results = sorted(_run_seeded(one, cfg.seeds))
    done = [(it, acc) for _, it, acc, ok in results if ok]
    if not done:
        raise SolverFailure("nmf variant %s converged on no seed"
                            % cfg.variant)
    mean, std = _mean_std([it for it, _ in done])
    acc_mean = float(np.mean([acc for _, acc in done]))
    columns = ("family", "variant", "n", "r", "eps", "seeds", "n_converged",
               "mean_iterations", "std_iterations", "mean_acc")
    rows = (("nmf", cfg.variant, cfg.n, cfg.r, cfg.eps, len(cfg.seeds),
             len(done), mean, std, acc_mean),)
    header = (_header([("family", "nmf"), ("variant", cfg.variant),
                       ("n", cfg.n), ("r", cfg.r), ("eps", cfg.eps),
                       ("max_iter", cfg.max_iter),
                       ("seeds", len(cfg.seeds)), ("format", cfg.fmt)]),)
    return ReportBundle(columns, rows, header)


def _run_cls(cfg):
    def one(seed):
        p = cls.gen_cls(n=cfg.n, m=cfg.m, s=cfg.s, sigma=cfg.sigma, seed=seed)
        return seed, cls.continuation_solve(p, taus=cfg.taus,
                                            max_iter=cfg.max_iter)

    results = sorted(_run_seeded(one, cfg.seeds))
    columns = ("seed", "tau", "iterations", "objective_ratio",
               "recovery_error")
    rows = []
    for seed, reports in results:
        for rep in reports:
            rows.append((seed, rep.tau, rep.iterations, rep.objective_ratio,
                         rep.recovery_error))
    header = [_header([("family", "cls"), ("n", cfg.n), ("m", cfg.m),
                       ("s", cfg.s), ("sigma", cfg.sigma),
                       ("taus", ",".join("%g" % t for t in cfg.taus)),
                       ("max_iter", cfg.max_iter),
                       ("seeds", len(cfg.seeds)), ("format", cfg.fmt)])]
    for i, tau in enumerate(cfg.taus):
        med = float(np.median([reports[i].recovery_error
                               for _, reports in results]))
        header.append("# tau=%g median_recovery_error=%.6g" % (tau, med))
    return ReportBundle(tuple(columns), tuple(rows), tuple(header))


def _run_check_kkt(cfg):
    with open(cfg.path) as fh:
        spec = json.load(fh)
    for key in ("q", "c", "x", "s"):
        if key not in spec:
            raise ValueError("point file is missing %r" % key)
    q = np.asarray(spec["q"], dtype=float)
    c = np.asarray(spec["c"], dtype=float)
    x = np.asarray(spec["x"], dtype=float)
    s = np.asarray(spec["s"], dtype=float)
    n = x.size
    grad_f = q @ x + c
    jac = np.eye(n)
    a = np.asarray(spec.get("a", np.ones(n)), dtype=float)
    if a.ndim == 0:
        a = np.full(n, float(a))
    zeta = cfg.zeta if cfg.zeta is not None else float(spec.get("zeta", 1e-6))
    nlp = optcert.nlp_approx_2n_measure(grad_f, x, s, x, jac, q, a, zeta)
    columns = ["eps_foc", "eps_pf", "eps_cs", "eps_pd", "eps_soc", "zeta"]
    values = [nlp.eps_foc, nlp.eps_pf, nlp.eps_cs, nlp.eps_pd, nlp.eps_soc,
              nlp.zeta]
    payload = {"nlp": dict(zip(columns, (float(v) for v in values)))}
    if "v" in spec:
        v = np.asarray(spec["v"], dtype=float)
        ssv = optcert.ssv_approx_2n_measure(grad_f, x, v, s, x, jac, q)
        columns += ["eps1", "eps2", "eps3"]
        values += [ssv.eps1, ssv.eps2, ssv.eps3]
        payload["ssv"] = {"eps1": float(ssv.eps1), "eps2": float(ssv.eps2),
                          "eps3": float(ssv.eps3)}
    header = (
        _header([("family", "check"), ("file", cfg.path), ("n", n),
                 ("zeta", zeta), ("format", cfg.fmt)]),
        json.dumps(payload, sort_keys=True),
    )
    return ReportBundle(tuple(columns), (tuple(values),), header)


_RUNNERS = {
    "qp": _run_qp,
    "lp-random": _run_lp_random,
    "lp-mps": _run_solve_mps,
    "nmf": _run_nmf,
    "cls": _run_cls,
    "check": _run_check_kkt,
}


def run_experiment(cfg):
    """Validate cfg, run its family's solvers over the seed list, write
    the report when cfg.out is set, and hand back the rows either way."""
    cfg.validate()
    bundle = _RUNNERS[cfg.family](cfg)
    if cfg.out is not None:
        emit_report(bundle.columns, bundle.rows, cfg.fmt, out=cfg.out)
    return bundle


# ---------------------------------------------------------------------------
# bench-all
# ---------------------------------------------------------------------------

def _bench_legs(seeds):
    return (
        ExperimentConfig(family="qp", n=60, kappa=10.0, method="both",
                         tol=1e-4, max_iter=10000, seeds=seeds),
        ExperimentConfig(family="lp-random", n=120, m=30, method="mpc",
                         eps=1e-8, max_iter=500, max_seconds=750.0,
                         seeds=seeds),
        ExperimentConfig(family="lp-random", n=120, m=30, method="ssv",
                         eps=1e-8, max_iter=500, max_seconds=750.0,
                         seeds=seeds),
        ExperimentConfig(family="nmf", n=60, r=6, variant="lbfgs", eps=1e-4,
                         max_iter=20000, seeds=seeds),
        ExperimentConfig(family="cls", n=200, m=50, s=3, sigma=1.0,
                         taus=cls.DEFAULT_TAUS, max_iter=200, seeds=seeds),
    )


def _run_bench_all(seeds, fmt, out):
    columns = ("family", "label", "seeds", "n_ok", "mean_iterations",
               "std_iterations")
    rows = []
    header = [_header([("family", "bench-all"), ("seeds", len(seeds)),
                       ("format", fmt)])]
    for leg in _bench_legs(seeds):
        bundle = run_experiment(leg)
        header.extend(bundle.header_lines)
        if leg.family == "cls":
            by_tau = {}
            for seed, tau, iters, _, _ in bundle.rows:
                by_tau.setdefault(tau, []).append(iters)
            for tau in sorted(by_tau, reverse=True):
                mean, std = _mean_std(by_tau[tau])
                rows.append(("cls", "tau=%g" % tau, len(seeds),
                             len(by_tau[tau]), mean, std))
        elif leg.family == "qp":
            for row in bundle.rows:
                rows.append(("qp", "method=%s" % row[1], len(seeds), row[6],
                             row[7], row[8]))
        elif leg.family == "lp-random":
            row = bundle.rows[0]
            rows.append(("lp-random", "method=%s" % row[1], len(seeds),
                         row[7], row[8], row[9]))
        else:
            row = bundle.rows[0]
            rows.append(("nmf", "variant=%s" % row[1], len(seeds), row[6],
                         row[7], row[8]))
    bundle = ReportBundle(columns, tuple(rows), tuple(header))
    if out is not None:
        emit_report(bundle.columns, bundle.rows, fmt, out=out)
    return bundle


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="sqvar",
        description="Squared-variable optimization harness.")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt_kw = dict(choices=("csv", "json"), default="csv")

    def add_common(sp):
        sp.add_argument("--out", default=None,
                        help="report file path (default: print to stdout)")
        sp.add_argument("--format", dest="fmt", help="report format",
                        **fmt_kw)

    sp = sub.add_parser(
        "qp", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="bound-constrained QP iteration bench")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--kappa", type=float, default=10.0)
    sp.add_argument("--method", choices=_QP_METHODS, default="both")
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.add_argument("--max-iter", type=int, default=10000)
    sp.add_argument("--seeds", default="0-9")
    add_common(sp)

    sp = sub.add_parser(
        "lp-random", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="random-LP iteration bench")
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--m", type=int, default=50)
    sp.add_argument("--method", choices=("pdip", "mpc", "ssv"),
                    default="mpc")
    sp.add_argument("--tau", type=float, default=None,
                    help="step fraction (default: per-method)")
    sp.add_argument("--eps", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--max-seconds", type=float, default=750.0)
    sp.add_argument("--solver-path", choices=("normal", "augmented"),
                    default="normal")
    sp.add_argument("--mpc-corrector", choices=("paper", "mehrotra"),
                    default="mehrotra")
    sp.add_argument("--seeds", default="0-9")
    add_common(sp)

    sp = sub.add_parser(
        "solve-mps", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="solve one MPS file; the report is the iteration trace")
    sp.add_argument("file")
    sp.add_argument("--method", choices=("pdip", "mpc", "ssv"),
                    default="mpc")
    sp.add_argument("--tau", type=float, default=None)
    sp.add_argument("--eps", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--max-seconds", type=float, default=750.0)
    sp.add_argument("--solver-path", choices=("normal", "augmented"),
                    default="normal")
    sp.add_argument("--mpc-corrector", choices=("paper", "mehrotra"),
                    default="mehrotra")
    add_common(sp)

    sp = sub.add_parser(
        "nmf", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="symmetric NMF iteration bench")
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--r", type=int, default=10)
    sp.add_argument("--variant", choices=nmf.VARIANTS, default="lbfgs")
    sp.add_argument("--eps", type=float, default=1e-4)
    sp.add_argument("--max-iter", type=int, default=20000)
    sp.add_argument("--seeds", default="0-9")
    add_common(sp)

    sp = sub.add_parser(
        "cls", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="pseudo-norm recovery continuation; one row per (seed, tau)")
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--m", type=int, default=207)
    sp.add_argument("--s", type=int, default=5)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--taus", default="1,1/2,1/4,1/6,1/8",
                    help="decreasing schedule; fractions like 1/6 allowed")
    sp.add_argument("--max-iter", type=int, default=200)
    sp.add_argument("--seeds", default="0-9")
    add_common(sp)

    sp = sub.add_parser(
        "check-kkt", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="print approximate optimality measures for a point file "
             "(JSON with q, c, x, s and optional v, a, zeta; the problem "
             "is min x'Qx/2 + c'x over x >= 0)")
    sp.add_argument("file")
    sp.add_argument("--zeta", type=float, default=None,
                    help="activity cutoff (default: file value or 1e-6)")
    add_common(sp)

    sp = sub.add_parser(
        "bench-all", formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="desk-scale sweep over every family")
    sp.add_argument("--seeds", default="0-2")
    add_common(sp)

    return parser


def _config_from_args(args):
    if args.command == "qp":
        return ExperimentConfig(
            family="qp", n=args.n, kappa=args.kappa, method=args.method,
            tol=args.tol, max_iter=args.max_iter,
            seeds=parse_seeds(args.seeds), out=args.out, fmt=args.fmt)
    if args.command == "lp-random":
        return ExperimentConfig(
            family="lp-random", n=args.n, m=args.m, method=args.method,
            tau=args.tau, eps=args.eps, max_iter=args.max_iter,
            max_seconds=args.max_seconds, solver_path=args.solver_path,
            mpc_corrector=args.mpc_corrector,
            seeds=parse_seeds(args.seeds), out=args.out, fmt=args.fmt)
    if args.command == "solve-mps":
        return ExperimentConfig(
            family="lp-mps", path=args.file, method=args.method,
            tau=args.tau, eps=args.eps, max_iter=args.max_iter,
            max_seconds=args.max_seconds, solver_path=args.solver_path,
            mpc_corrector=args.mpc_corrector, out=args.out, fmt=args.fmt)
    if args.command == "nmf":
        return ExperimentConfig(
            family="nmf", n=args.n, r=args.r, variant=args.variant,
            eps=args.eps, max_iter=args.max_iter,
            seeds=parse_seeds(args.seeds), out=args.out, fmt=args.fmt)
    if args.command == "cls":
        return ExperimentConfig(
            family="cls", n=args.n, m=args.m, s=args.s, sigma=args.sigma,
            taus=parse_taus(args.taus), max_iter=args.max_iter,
            seeds=parse_seeds(args.seeds), out=args.out, fmt=args.fmt)
    if args.command == "check-kkt":
        return ExperimentConfig(
            family="check", path=args.file, zeta=args.zeta, out=args.out,
            fmt=args.fmt)
    raise ValueError("unknown command %r" % (args.command,))


def _error_record(kind, exc, stream):
    record = {"error": type(exc).__name__, "kind": kind,
              "message": str(exc)}
    print(json.dumps(record, sort_keys=True), file=stream)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bench-all":
            bundle = _run_bench_all(parse_seeds(args.seeds), args.fmt,
                                    args.out)
            fmt, out = args.fmt, args.out
        else:
            cfg = _config_from_args(args)
            bundle = run_experiment(cfg)
            fmt, out = cfg.fmt, cfg.out
    except (ValueError, OSError, json.JSONDecodeError, RankDeficient,
            NotSymmetric) as exc:
        _error_record("validation", exc, sys.stderr)
        return EXIT_VALIDATION
    except (SolverFailure, SingularSystem, nmf.MaxIterReached) as exc:
        _error_record("solver", exc, sys.stderr)
        return EXIT_SOLVER
    for line in bundle.header_lines:
        print(line)
    if out is None:
        print(rows_to_string(bundle.columns, bundle.rows, fmt), end="")
    else:
        print("# wrote %s" % out)
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
