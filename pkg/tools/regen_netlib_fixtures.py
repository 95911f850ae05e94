"""Regenerate the Netlib LP fixtures under tests/data/ as MPS decks.

The scipy source distribution ships AFIRO and ADLITTLE as npz archives
(c, A_ub, b_ub, A_eq, b_eq) under benchmarks/linprog_benchmark_files/.
This script rewrites them as free-format MPS text with generic row and
column names, full float64 precision, and no RANGES or BOUNDS sections,
so the parser tests and the Netlib acceptance runs do not depend on
network access. Usage:

    python3 tools/regen_netlib_fixtures.py [path-to-linprog_benchmark_files]
"""

import pathlib
import sys

import numpy as np

DEFAULT_SRC = "/tmp/scipy-1.15.3/benchmarks/benchmarks/linprog_benchmark_files"
OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def emit_mps(name, c, a_ub, b_ub, a_eq, b_eq):
    ub_names = ["L%d" % (i + 1) for i in range(len(b_ub))]
    eq_names = ["E%d" % (i + 1) for i in range(len(b_eq))]
    col_names = ["X%d" % (j + 1) for j in range(len(c))]
    lines = ["NAME %s" % name, "ROWS", " N COST"]
    lines += [" L %s" % r for r in ub_names]
    lines += [" E %s" % r for r in eq_names]
    lines.append("COLUMNS")
    rows = np.vstack([a_ub, a_eq]) if len(b_eq) else np.asarray(a_ub)
    row_names = ub_names + eq_names
    for j, col in enumerate(col_names):
        if c[j] != 0.0:
            lines.append("    %s COST %.17g" % (col, c[j]))
        for i in np.flatnonzero(rows[:, j]):
            lines.append("    %s %s %.17g" % (col, row_names[i], rows[i, j]))
    lines.append("RHS")
    for r, beta in zip(row_names, np.concatenate([b_ub, b_eq])):
        if beta != 0.0:
            lines.append("    RHS %s %.17g" % (r, beta))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def main():
    src = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else DEFAULT_SRC)
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name in ("AFIRO", "ADLITTLE"):
        data = np.load(src / ("%s.npz" % name), allow_pickle=True)
        if data["bounds"].size:
            raise SystemExit("%s has explicit bounds; emitter assumes x >= 0"
                             % name)
        text = emit_mps(name, data["c"], data["A_ub"], data["b_ub"],
                        data["A_eq"], data["b_eq"])
        out = OUT_DIR / ("%s.mps" % name.lower())
        out.write_text(text)
        print("wrote %s (%d rows, %d cols, obj %.8f)"
              % (out, len(data["b_ub"]) + len(data["b_eq"]), len(data["c"]),
                 float(data["obj"])))


if __name__ == "__main__":
    main()
