"""Reader for MPS-format linear programs (Netlib style) plus the
conversion into the upper-bounded standard form

    minimize c'x  subject to  Ax = b,  0 <= x_I <= u,  0 <= x_rest

consumed by the lp module. parse_mps builds a faithful in-memory model
of the file; to_lp_u rewrites inequality rows with slack columns,
absorbs variable shifts into the right-hand side and an objective
constant, and records enough bookkeeping to map a standard-form
solution back onto the original variables. No presolve is applied.
"""

from dataclasses import dataclass

import numpy as np

from .lp import LpProblem

__all__ = [
    "GeneralLp",
    "StandardFormMap",
    "ParseError",
    "UnsupportedFeature",
    "parse_mps",
    "to_lp_u",
]

_ROW_KINDS = ("N", "L", "G", "E")
_VALUE_BOUNDS = ("UP", "LO", "FX")
_FLAG_BOUNDS = ("FR", "MI", "PL")
_SECTION_ORDER = ("NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS",
                  "ENDATA")


class ParseError(ValueError):
    """MPS text violates the format; message carries the line number."""


class UnsupportedFeature(ValueError):
    """The file or model uses a construct outside the implemented subset."""


@dataclass(frozen=True)
class GeneralLp:
    """In-memory model of one MPS file, before any reformulation.

    row_kinds maps constraint row names to L/G/E; the objective row is
    kept separate. entries maps (row, column) pairs to coefficients
    with duplicates already summed. bounds maps column names to
    (lower, upper) pairs where None means the default (0 below,
    unbounded above). rhs and ranges default to 0 / absent.
    """

    name: str
    objective_row: str
    row_names: tuple
    row_kinds: dict
    col_names: tuple
    entries: dict
    rhs: dict
    ranges: dict
    bounds: dict

    def n_rows(self):
        return len(self.row_names)

    def n_cols(self):
        return len(self.col_names)


@dataclass(frozen=True)
class StandardFormMap:
    """Recipe for mapping a standard-form solution back to the original.

    var_records holds one entry per original column, aligned with
    GeneralLp.col_names:

        ("plain", j)       value = x[j]
        ("shift", j, l)    value = x[j] + l
        ("flip", j, u)     value = u - x[j]
        ("split", p, q)    value = x[p] - x[q]
        ("fixed", f)       value = f

    slack_records lists (row_name, column, sign) for the slack columns
    appended to inequality rows. objective_constant is the amount to add
    to c'x of the standard form to recover the original objective value.
    """

    var_records: tuple
    slack_records: tuple
    objective_constant: float

    def recover(self, x):
        """Original-variable values for a standard-form solution x."""
        x = np.asarray(x, dtype=float)
        out = np.empty(len(self.var_records))
        for i, rec in enumerate(self.var_records):
            kind = rec[0]
            if kind == "plain":
                out[i] = x[rec[1]]
            elif kind == "shift":
                out[i] = x[rec[1]] + rec[2]
            elif kind == "flip":
                out[i] = rec[2] - x[rec[1]]
            elif kind == "split":
                out[i] = x[rec[1]] - x[rec[2]]
            else:
                out[i] = rec[1]
        return out


# ---- parsing ----


def _fail(lineno, reason):
    raise ParseError("line %d: %s" % (lineno, reason))


def _number(token, lineno):
    try:
        return float(token)
    except ValueError:
        _fail(lineno, "malformed number %r" % token)


def _pairs(fields, lineno):
    """Split trailing (name, value) pairs of a COLUMNS/RHS/RANGES line."""
    if len(fields) % 2 != 0 or not fields:
        _fail(lineno, "expected name/value pairs, got %d fields"
              % len(fields))
    out = []
    for at in range(0, len(fields), 2):
        out.append((fields[at], _number(fields[at + 1], lineno)))
    return out


def parse_mps(text):
    """Parse MPS text into a GeneralLp.

    Accepts fixed and free format alike by splitting data lines on
    whitespace; section headers start in the first character of a line.
    Sections must appear in the order NAME, ROWS, COLUMNS, RHS,
    [RANGES], [BOUNDS], ENDATA. Raises ParseError with a line number on
    format violations and UnsupportedFeature on known-but-unimplemented
    constructs (integer markers, BV/LI/UI bounds).
    """
    name = ""
    objective_row = None
    extra_free_rows = set()
    row_names = []
    row_kinds = {}
    col_names = []
    col_seen = set()
    entries = {}
    rhs = {}
    ranges = {}
    bounds = {}
    bound_types_seen = {}

    section = None
    done = set()
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if ended:
            _fail(lineno, "content after ENDATA")
        is_header = not raw[0].isspace()
        fields = raw.split()

        if is_header:
            header = fields[0].upper()
            if header not in _SECTION_ORDER:
                raise UnsupportedFeature(
                    "line %d: section %s is not supported" % (lineno, header))
            if header in done:
                _fail(lineno, "duplicate section %s" % header)
            order = _SECTION_ORDER.index(header)
            if any(_SECTION_ORDER.index(d) > order for d in done):
                _fail(lineno, "section %s out of order" % header)
            if header == "NAME":
                name = fields[1] if len(fields) > 1 else ""
            elif header == "ENDATA":
                ended = True
            done.add(header)
            section = header
            continue

        if section == "ROWS":
            if len(fields) != 2:
                _fail(lineno, "ROWS line needs kind and name")
            kind, row = fields[0].upper(), fields[1]
            if kind not in _ROW_KINDS:
                _fail(lineno, "unknown row kind %r" % fields[0])
            if row in row_kinds or row == objective_row \
                    or row in extra_free_rows:
                _fail(lineno, "duplicate row %s" % row)
            if kind == "N":
                if objective_row is None:
                    objective_row = row
                else:
                    extra_free_rows.add(row)
            else:
                row_names.append(row)
                row_kinds[row] = kind
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1].upper() == "'MARKER'":
                raise UnsupportedFeature(
                    "line %d: integer markers (MARKER) are not supported"
                    % lineno)
            col = fields[0]
            if col not in col_seen:
                col_seen.add(col)
                col_names.append(col)
            for row, value in _pairs(fields[1:], lineno):
                if row in extra_free_rows:
                    continue
                if row != objective_row and row not in row_kinds:
                    _fail(lineno, "unknown row %s" % row)
                key = (row, col)
                entries[key] = entries.get(key, 0.0) + value
        elif section == "RHS":
            for row, value in _pairs(fields[1:], lineno):
                if row in extra_free_rows:
                    continue
                if row != objective_row and row not in row_kinds:
                    _fail(lineno, "unknown row %s" % row)
                rhs[row] = value
        elif section == "RANGES":
            for row, value in _pairs(fields[1:], lineno):
                if row not in row_kinds:
                    _fail(lineno, "unknown row %s" % row)
                ranges[row] = value
        elif section == "BOUNDS":
            if len(fields) < 3:
                _fail(lineno, "BOUNDS line needs type, set name and column")
            btype = fields[0].upper()
            col = fields[2]
            if btype not in _VALUE_BOUNDS and btype not in _FLAG_BOUNDS:
                raise UnsupportedFeature(
                    "line %d: bound type %s is not supported"
                    % (lineno, btype))
            if col not in col_seen:
                _fail(lineno, "unknown column %s" % col)
            seen = bound_types_seen.setdefault(col, set())
            if btype in seen:
                _fail(lineno, "duplicate bound %s on %s" % (btype, col))
            seen.add(btype)
            lower, upper = bounds.get(col, (None, None))
            if btype in _VALUE_BOUNDS:
                if len(fields) < 4:
                    _fail(lineno, "bound type %s needs a value" % btype)
                value = _number(fields[3], lineno)
                if btype == "UP":
                    upper = value
                    if value < 0.0 and lower is None:
                        lower = -np.inf
                elif btype == "LO":
                    lower = value
                else:
                    lower = upper = value
            elif btype == "FR":
                lower, upper = -np.inf, np.inf
            elif btype == "MI":
                lower = -np.inf
            bounds[col] = (lower, upper)
        elif section in ("NAME", "ENDATA"):
            _fail(lineno, "unexpected data in %s section" % section)
        else:
            _fail(lineno, "data before any section header")

    if not ended:
        raise ParseError("missing ENDATA")
    for must in ("ROWS", "COLUMNS"):
        if must not in done:
            raise ParseError("missing %s section" % must)
    if objective_row is None:
        raise ParseError("no objective (N) row declared")

    return GeneralLp(name=name, objective_row=objective_row,
                     row_names=tuple(row_names), row_kinds=dict(row_kinds),
                     col_names=tuple(col_names), entries=dict(entries),
                     rhs=dict(rhs), ranges=dict(ranges), bounds=dict(bounds))


# ---- conversion to standard form ----


def _row_interval(g, row):
    """Closed activity interval [lo, hi] implied by kind, rhs and range."""
    beta = g.rhs.get(row, 0.0)
    kind = g.row_kinds[row]
    if row in g.ranges:
        r = g.ranges[row]
        if kind == "L":
            return beta - abs(r), beta
        if kind == "G":
            return beta, beta + abs(r)
        if r >= 0.0:
            return beta, beta + r
        return beta + r, beta
    if kind == "L":
        return -np.inf, beta
    if kind == "G":
        return beta, np.inf
    return beta, beta


def to_lp_u(g, negate_objective=False):
    """Convert a GeneralLp into (LpProblem, StandardFormMap).

    L and G rows gain slack and surplus columns; RANGES turn into upper
    bounds on those slacks; finite lower bounds are shifted into the
    right-hand side and the objective constant; free variables are split
    into positive and negative parts; variables bounded only above are
    flipped; FX variables are eliminated. negate_objective flips the
    sign of c (and the constant) for decks meant as maximizations.
    """
    n_rows = g.n_rows()
    dense = np.zeros((n_rows, g.n_cols()))
    cost = np.zeros(g.n_cols())
    row_pos = {r: i for i, r in enumerate(g.row_names)}
    col_pos = {c: j for j, c in enumerate(g.col_names)}
    for (row, col), value in g.entries.items():
        if row == g.objective_row:
            cost[col_pos[col]] += value
        else:
            dense[row_pos[row], col_pos[col]] += value
    constant = -g.rhs.get(g.objective_row, 0.0)
    if negate_objective:
        cost = -cost
        constant = -constant

    # shifts, flips and eliminations move constants out of each row; they
    # accumulate here and combine with the row's target value at the end
    adjust = np.zeros(n_rows)

    cols = []
    new_cost = []
    upper = []
    var_records = []
    for j, colname in enumerate(g.col_names):
        lower, up = g.bounds.get(colname, (None, None))
        lo = 0.0 if lower is None else lower
        hi = np.inf if up is None else up
        a_col = dense[:, j]
        c_j = cost[j]
        if hi < lo:
            raise UnsupportedFeature(
                "column %s has crossed bounds [%g, %g]" % (colname, lo, hi))
        if np.isfinite(lo) and lo == hi:
            adjust -= a_col * lo
            constant += c_j * lo
            var_records.append(("fixed", lo))
        elif np.isfinite(lo):
            if lo != 0.0:
                adjust -= a_col * lo
                constant += c_j * lo
                var_records.append(("shift", len(cols), lo))
            else:
                var_records.append(("plain", len(cols)))
            cols.append(a_col)
            new_cost.append(c_j)
            upper.append(hi - lo if np.isfinite(hi) else None)
        elif np.isfinite(hi):
            adjust -= a_col * hi
            constant += c_j * hi
            var_records.append(("flip", len(cols), hi))
            cols.append(-a_col)
            new_cost.append(-c_j)
            upper.append(None)
        else:
            var_records.append(("split", len(cols), len(cols) + 1))
            cols.append(a_col)
            new_cost.append(c_j)
            upper.append(None)
            cols.append(-a_col)
            new_cost.append(-c_j)
            upper.append(None)

    b = np.zeros(n_rows)
    slack_records = []
    for i, row in enumerate(g.row_names):
        lo, hi = _row_interval(g, row)
        if lo == hi:
            b[i] = lo + adjust[i]
            continue
        width = hi - lo
        col = np.zeros(n_rows)
        if np.isfinite(hi):
            # a'x + s = hi with s in [0, hi - lo]
            col[i] = 1.0
            b[i] = hi + adjust[i]
            sign = 1.0
        else:
            # a'x - s = lo with s >= 0
            col[i] = -1.0
            b[i] = lo + adjust[i]
            sign = -1.0
        slack_records.append((row, len(cols), sign))
        cols.append(col)
        new_cost.append(0.0)
        upper.append(width if np.isfinite(width) else None)

    a = np.column_stack(cols) if cols else np.zeros((n_rows, 0))
    idx = np.array([j for j, ub in enumerate(upper) if ub is not None],
                   dtype=int)
    u = np.array([upper[j] for j in idx])
    problem = LpProblem(a=a, b=b, c=np.array(new_cost), upper_idx=idx, u=u)
    fmap = StandardFormMap(var_records=tuple(var_records),
                           slack_records=tuple(slack_records),
                           objective_constant=constant)
    return problem, fmap
