"""Benchmark the compiled prox core against the NumPy fallback.

Times the hot kernel (single-component Burg prox solves) on a benchmark-
sized workload, plus one end-to-end run through each backend.

    python benchmarks/bench_backends.py [--queries 20000] [--d 100]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from bsppa import backend, make_poisson_instance


def bench_row_solver(queries, d):
    prob = make_poisson_instance(200, d, "interpolation", seed=3)
    rng = np.random.default_rng(0)
    idx = rng.integers(prob.n, size=queries)
    xs = rng.uniform(0.5, 2.0, (queries, d)) * prob.minimizer_xstar
    es = rng.normal(0.0, 0.05, (queries, d)) * prob.rel_smoothness_L / d
    alpha = 0.2 / prob.rel_smoothness_L
    results = {}
    for name, impl in backend.implementations():
        solve = impl.solve_prox_poisson_burg_row
        total_iters = 0
        start = time.perf_counter()
        for q in range(queries):
            i = int(idx[q])
            _, _, iters, status = solve(prob.A[i], float(prob.b[i]), xs[q], es[q],
                                        alpha, 1e-8, 500)
            assert status == 0
            total_iters += iters
        elapsed = time.perf_counter() - start
        results[name] = elapsed
        print(f"  {name:8s} {queries} solves in {elapsed:6.2f}s "
              f"({1e6 * elapsed / queries:7.1f} us/solve, avg {total_iters / queries:.1f} inner iters)",
              flush=True)
    return results


def bench_end_to_end(iterations):
    script = (
        "import time, numpy as np\n"
        "from bsppa import backend, make_poisson_instance, RunConfig, run_unified\n"
        "prob = make_poisson_instance(200, 50, 'interpolation', seed=3)\n"
        "cfg = RunConfig(variant='saga', kernel='burg',\n"
        f"                alpha0=0.2 / prob.rel_smoothness_L, iterations={iterations}, seed=1)\n"
        "t0 = time.perf_counter()\n"
        "trace = run_unified(cfg, prob)\n"
        "print(f'  {backend.backend_name():8s} {time.perf_counter() - t0:6.2f}s "
        "for one run, final gap {trace.records[-1].objective_gap:.3e}')\n"
    )
    for force in ("0", "1"):
        env = {**os.environ, "BSPPA_FORCE_PYTHON": force}
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--queries", type=int, default=20000)
    parser.add_argument("--d", type=int, default=100)
    parser.add_argument("--iterations", type=int, default=20000)
    args = parser.parse_args()
    print(f"active backend: {backend.backend_name()}", flush=True)
    print(f"hot kernel ({args.queries} prox solves, d={args.d}):", flush=True)
    results = bench_row_solver(args.queries, args.d)
    if "cython" in results:
        print(f"  speedup: {results['python'] / results['cython']:.1f}x", flush=True)
    print(f"end to end ({args.iterations} outer iterations, both backends):", flush=True)
    bench_end_to_end(args.iterations)


if __name__ == "__main__":
    main()
