"""Squared-variable reformulation solvers and optimality certificates."""

from . import bcqp, cli, cls, core, lp, mps, nmf, optcert, report

__all__ = ["bcqp", "cli", "cls", "core", "lp", "mps", "nmf", "optcert",
           "report"]
__version__ = "0.1.0"
