"""Grid sweeps: variants x stepsizes x seeds, one trace per cell.

Cells are share-nothing and run in a process pool; BSPPA_THREADS (or the
--threads flag) caps the worker count. Per-cell failures are recorded in
the summary and never abort the sweep. The summary writer is the only
synchronization point.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import backend
from .errors import BsppaError, InvalidConfig
from .problems import load_instance
from .runner import RunConfig, run_unified
from .traceio import file_sha256, write_manifest, write_trace


def worker_count(threads=None):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("BSPPA_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_cell(args):
    instance_path, base_config, variant, alpha, seed, out_dir = args
    cell_dir = Path(out_dir) / variant / str(alpha)
    cell_dir.mkdir(parents=True, exist_ok=True)
    trace_path = cell_dir / f"{seed}.csv"
    manifest_path = cell_dir / f"{seed}.manifest.json"
    row = {
        "variant": variant,
        "alpha": alpha,
        "seed": seed,
        "status": "error",
        "final_gap": "",
        "best_gap": "",
        "trace_path": str(trace_path),
        "error": "",
    }
    try:
        problem = load_instance(instance_path)
        config = RunConfig(**{**base_config, "variant": variant, "alpha0": alpha, "seed": seed})
        trace = run_unified(config, problem)
        write_trace(trace, trace_path)
        gaps = [r.objective_gap for r in trace.records]
        write_manifest(
            manifest_path,
            config=trace.config,
            status=trace.status,
            trace_path=str(trace_path),
            backend=backend.backend_name(),
            instance_path=str(instance_path),
            instance_sha256=file_sha256(instance_path),
            final_gap=gaps[-1],
            duration_seconds=trace.records[-1].wallclock_seconds,
            record_count=len(trace.records),
        )
        row.update(status=trace.status, final_gap=gaps[-1], best_gap=min(gaps))
    except BsppaError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


SUMMARY_COLUMNS = ("variant", "alpha", "seed", "status", "final_gap", "best_gap", "trace_path", "error")


def run_sweep(grid, out_dir, threads=None):
    """Run every cell of a grid spec and write summary.csv under out_dir.

    grid: {"instance": path, "variants": [...], "alphas": [...],
           "seeds": [...], "config": {base RunConfig fields}}
    """
    for key in ("instance", "variants", "alphas", "seeds"):
        if key not in grid:
            raise InvalidConfig(f"sweep grid is missing {key!r}")
    base = dict(grid.get("config", {}))
    for reserved in ("variant", "alpha0", "seed"):
        if reserved in base:
            raise InvalidConfig(f"grid config must not fix {reserved!r}; it is swept")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = [
        (grid["instance"], base, variant, alpha, seed, str(out_dir))
        for variant in grid["variants"]
        for alpha in grid["alphas"]
        for seed in grid["seeds"]
    ]
    workers = min(worker_count(threads), len(cells))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(cell) for cell in cells]
    summary_path = out_dir / "summary.csv"
    with open(summary_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return rows, summary_path
