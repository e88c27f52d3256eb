"""Numeric CSV reading shared by the experiment loaders and the CLI."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


class CsvError(ValueError):
    """Malformed numeric table."""


class MissingColumnError(KeyError):
    """Requested column is not in the header."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing column"


def read_numeric_csv(path):
    """Read a header + numeric-rows CSV.

    Returns ``(header, values)`` with ``values`` of shape ``(rows, columns)``.
    Raises FileNotFoundError for a missing file and CsvError naming the
    1-based line of the first bad row or cell.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CsvError(f"{path}: empty file, expected a header row") from None
        rows = []
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvError(f"{path}: line {line} has {len(row)} fields, "
                               f"header has {len(header)}")
            parsed = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise CsvError(f"{path}: line {line}, column {name!r}: "
                                   f"cannot parse {cell.strip()!r} as a number") from None
                if math.isnan(v):
                    raise CsvError(f"{path}: line {line}, column {name!r}: missing value")
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise CsvError(f"{path}: no data rows")
    return header, np.array(rows, dtype=float)


def column_index(header, spec):
    """Resolve a column given by name or 0-based integer index."""
    if isinstance(spec, (int, np.integer)):
        if not -len(header) <= spec < len(header):
            raise MissingColumnError(f"column index {spec} out of range for "
                                     f"{len(header)} columns")
        return int(spec) % len(header)
    if spec in header:
        return header.index(spec)
    if isinstance(spec, str) and spec.lstrip("-").isdigit():
        return column_index(header, int(spec))
    raise MissingColumnError(f"column {spec!r} not found; header is {header}")


def write_numeric_csv(path, header, values):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in values:
            w.writerow([repr(float(v)) for v in row])
