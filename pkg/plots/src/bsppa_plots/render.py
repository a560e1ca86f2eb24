"""Convergence-figure rendering.

One labeled curve per input trace: epochs on the x axis, the chosen metric
(objective gap or Bregman distance to the minimizer) on a log-scaled y axis
by default. Long traces are downsampled to a min/max envelope so the
oscillation band survives, drawn as a single polyline per trace.

A metadata sidecar (<image>.meta.json) records curve count, axis scale and
labels for golden-file checks.
"""

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .traces import read_trace

FIGURE_SCHEMA = "bsppa-figure-1"
MAX_POINTS_PER_CURVE = 2000

Y_AXES = ("objective_gap", "bregman_dist_to_xstar")


class BadFigureSpec(Exception):
    pass


def load_spec(path):
    with open(path, encoding="utf-8") as f:
        spec = json.load(f)
    if spec.get("schema") != FIGURE_SCHEMA:
        raise BadFigureSpec(f"{path}: expected schema {FIGURE_SCHEMA!r}")
    if not spec.get("traces"):
        raise BadFigureSpec(f"{path}: no input traces")
    if spec.get("y_axis", "objective_gap") not in Y_AXES:
        raise BadFigureSpec(f"{path}: y_axis must be one of {Y_AXES}")
    if "out" not in spec:
        raise BadFigureSpec(f"{path}: missing output image path")
    return spec


def envelope(x, y, max_points=MAX_POINTS_PER_CURVE):
    """Downsample to per-bucket (min, max) pairs, keeping oscillation edges.

    Returns a single polyline of at most max_points vertices.
    """
    n = x.size
    if n <= max_points:
        return x, y
    buckets = max_points // 2
    edges = np.linspace(0, n, buckets + 1, dtype=int)
    xs, ys = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        seg = y[lo:hi]
        xm = 0.5 * (x[lo] + x[hi - 1])
        ys.extend((np.min(seg), np.max(seg)))
        xs.extend((xm, xm))
    return np.array(xs), np.array(ys)


def render_convergence(spec, base_dir="."):
    """Render one figure per spec; returns the metadata dictionary."""
    base = Path(base_dir)
    y_axis = spec.get("y_axis", "objective_gap")
    log_y = bool(spec.get("log_y", True))
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    labels = []
    for entry in spec["traces"]:
        path = base / entry["path"]
        data = read_trace(path)
        if y_axis not in data:
            raise BadFigureSpec(f"{path}: trace has no {y_axis!r} column")
        y = data[y_axis]
        if np.all(np.isnan(y)):
            raise BadFigureSpec(f"{path}: column {y_axis!r} is empty")
        label = entry.get("label", Path(entry["path"]).stem)
        x, y = envelope(data["epoch"], y)
        ax.plot(x, y, label=label, linewidth=1.0)
        labels.append(label)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("epochs")
    ax.set_ylabel(y_axis.replace("_", " "))
    if spec.get("title"):
        ax.set_title(spec["title"])
    ax.legend()
    out = base / spec["out"]
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.get("dpi", 120))
    meta = {
        "image": str(out),
        "curve_count": len(ax.get_lines()),
        "y_scale": ax.get_yscale(),
        "y_axis": y_axis,
        "labels": labels,
    }
    plt.close(fig)
    with open(str(out) + ".meta.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")
    return meta
