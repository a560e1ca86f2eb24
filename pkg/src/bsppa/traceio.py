"""Trace CSV and run-manifest serialization.

Traces are CSV with a leading `# schema=` comment line; floats use the
shortest round-trip representation so a rerun on the same platform and
backend reproduces the file byte for byte. The volatile wallclock column is
therefore excluded unless explicitly requested; total duration lives in the
manifest instead.
"""

import csv
import hashlib
import json

import numpy as np

from .errors import SchemaMismatch

TRACE_SCHEMA = "bsppa-trace-1"
MANIFEST_SCHEMA = "bsppa-manifest-1"

COLUMNS = (
    "iteration",
    "epoch",
    "objective_gap",
    "bregman_dist_to_xstar",
    "sigma_sq",
    "stepsize",
    "inner_iterations",
)
WALLCLOCK_COLUMN = "wallclock_seconds"


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_trace(trace, path, include_wallclock=False):
    columns = COLUMNS + ((WALLCLOCK_COLUMN,) if include_wallclock else ())
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema={TRACE_SCHEMA}\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        for rec in trace.records:
            writer.writerow([_fmt(getattr(rec, col)) for col in columns])


def read_trace(path):
    """Parse a trace file into {"schema", "columns", <column arrays>}."""
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
    out = {"schema": schema, "columns": columns}
    for j, col in enumerate(columns):
        vals = [row[j] for row in rows]
        if col in ("iteration", "inner_iterations"):
            out[col] = np.array([int(v) for v in vals], dtype=int)
        else:
            out[col] = np.array([float(v) if v else np.nan for v in vals])
    return out


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(path, *, config, status, trace_path, backend,
                   instance_path=None, instance_sha256=None, generator=None,
                   final_gap=None, duration_seconds=None, record_count=0):
    doc = {
        "schema": MANIFEST_SCHEMA,
        "status": status,
        "backend": backend,
        "config": config,
        "seed_streams": {
            "master_seed": config["seed"],
            "children": ["component_indices", "anchor_coins", "epoch_picks"],
        },
        "instance": {
            "path": instance_path,
            "sha256": instance_sha256,
            "generator": generator,
        },
        "trace_path": trace_path,
        "records": record_count,
        "final_objective_gap": final_gap,
        "duration_seconds": duration_seconds,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    return doc


def read_manifest(path):
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("schema") != MANIFEST_SCHEMA:
        raise SchemaMismatch(f"{path}: unexpected manifest schema {doc.get('schema')!r}")
    return doc
