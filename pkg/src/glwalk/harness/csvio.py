"""Streaming CSV emission with reproducible formatting.

Floats are written with 17 significant digits so a rerun with the same
seed produces byte-identical files and a downstream reader recovers the
exact double.  Booleans become 1/0.  Rows are written as they are
produced, so generators can stream arbitrarily long tables.
"""

import csv

import numpy as np


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def emit_csv(path, header, rows) -> int:
    """Write header plus rows to path; returns the number of data rows."""
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(v) for v in row])
            count += 1
    return count


def read_csv(path):
    """Read back a CSV as (header, list of row dicts with raw strings)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return list(reader.fieldnames or []), list(reader)
