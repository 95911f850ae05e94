"""Solve traces and report emission.

Reports are written as CSV (header row plus one line per record) or JSON
(array of objects, one per record). Every float is rendered through the
same 17-significant-digit formatter in both formats, so a CSV cell and
the matching JSON number are the same decimal string and survive a
round trip bit for bit. Wall-clock fields are kept on traces for the
cooperative time limits but never emitted; emitted bytes depend only on
the configuration and seeds.
"""

import csv
import io
import json
import math

import numpy as np

__all__ = ["SolveTrace", "format_value", "write_rows", "rows_to_string"]


def format_value(value):
    """Render one cell: floats at 17 significant digits, the rest as-is."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError("non-finite value in report: %r" % value)
        return "%.17g" % value
    return str(value)


class SolveTrace:
    """Per-iteration rows accumulated by a solver.

    columns names the fields; rows are tuples in that order. The first
    column is expected to be the iteration counter and must increase
    strictly, which validate() checks before emission.
    """

    def __init__(self, columns):
        self.columns = tuple(columns)
        self.rows = []

    def append(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("expected %d values, got %d"
                             % (len(self.columns), len(values)))
        self.rows.append(tuple(values))

    def __len__(self):
        return len(self.rows)

    def last(self):
        return self.rows[-1]

    def validate(self):
        prev = None
        for row in self.rows:
            if prev is not None and row[0] <= prev:
                raise ValueError("iteration counter not strictly increasing")
            prev = row[0]
            for cell in row[1:]:
                if isinstance(cell, (float, np.floating)) and not math.isfinite(cell):
                    raise ValueError("non-finite trace value at iteration %s"
                                     % (row[0],))


def rows_to_string(columns, rows, fmt):
    """Serialize records to a CSV or JSON string (see module docstring)."""
    columns = list(columns)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        parts = []
        for row in rows:
            fields = []
            for name, value in zip(columns, row):
                if isinstance(value, (bool, np.bool_)):
                    rendered = "true" if value else "false"
                elif isinstance(value, (int, np.integer, float, np.floating)):
                    rendered = format_value(value)
                else:
                    rendered = json.dumps(str(value))
                fields.append("%s: %s" % (json.dumps(name), rendered))
            parts.append("  {" + ", ".join(fields) + "}")
        return "[\n" + ",\n".join(parts) + "\n]\n"
    raise ValueError("unknown format %r" % (fmt,))


def write_rows(path, columns, rows, fmt):
    """Write records to path; fmt is "csv" or "json"."""
    text = rows_to_string(columns, rows, fmt)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    return path
