"""Reader for the solver's trace CSV interface.

A trace starts with a `# schema=bsppa-trace-1` line, then a CSV header and
rows. Optional columns are empty strings, parsed as NaN.
"""

import csv

import numpy as np

TRACE_SCHEMA = "bsppa-trace-1"


class SchemaMismatch(Exception):
    """Trace file carries a different schema version."""


class EmptyTrace(Exception):
    """Trace file has no data rows."""


def read_trace(path):
    with open(path, encoding="utf-8") as f:
        first = f.readline().strip()
        if not first.startswith("# schema="):
            raise SchemaMismatch(f"{path}: missing schema line")
        schema = first.split("=", 1)[1]
        if schema != TRACE_SCHEMA:
            raise SchemaMismatch(f"{path}: schema {schema!r}, expected {TRACE_SCHEMA!r}")
        reader = csv.reader(f)
        columns = next(reader)
        rows = list(reader)
    if not rows:
        raise EmptyTrace(f"{path}: no data rows")
    out = {"schema": schema, "columns": columns, "path": str(path)}
    for j, name in enumerate(columns):
        out[name] = np.array([float(r[j]) if r[j] else np.nan for r in rows])
    return out
