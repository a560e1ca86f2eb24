"""Parity between the compiled core and the NumPy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from bsppa import _burg_ref, backend, make_poisson_instance

HAVE_FAST = backend.BACKEND == "cython"

fast = pytest.importorskip("bsppa._burg_fast") if HAVE_FAST else None


@pytest.mark.skipif(not HAVE_FAST, reason="compiled core not built")
def test_row_solver_parity(rng):
    # float summation order differs between the backends, so accept
    # decisions at the noise floor (and hence iteration counts) may differ;
    # both must return certified near-solutions of the same subproblem
    prob = make_poisson_instance(20, 8, "interpolation", seed=20)
    tol = 1e-9
    for _ in range(200):
        i = int(rng.integers(prob.n))
        x_k = rng.uniform(0.3, 3.0, prob.d)
        e = rng.normal(0.0, 0.1, prob.d)
        alpha = float(rng.uniform(0.005, 0.3 / prob.rel_smoothness_L))
        args = (prob.A[i].copy(), float(prob.b[i]), x_k, e, alpha, tol, 500)
        xf, rf, itf, stf = fast.solve_prox_poisson_burg_row(*args)
        xp, rp, itp, stp = _burg_ref.solve_prox_poisson_burg_row(*args)
        assert stf == stp == _burg_ref.STATUS_OK
        assert rf <= tol and rp <= tol
        np.testing.assert_allclose(np.asarray(xf), xp, rtol=1e-6, atol=1e-9)


@pytest.mark.skipif(not HAVE_FAST, reason="compiled core not built")
def test_row_solver_status_codes(rng):
    prob = make_poisson_instance(5, 3, "interpolation", seed=5)
    a, b = prob.A[0].copy(), float(prob.b[0])
    x_k = np.ones(3)
    # residual target unmet in 1 iteration
    _, _, _, st = fast.solve_prox_poisson_burg_row(a, b, x_k, np.zeros(3), 0.1, 1e-15, 1)
    assert st == backend.STATUS_NO_PROGRESS
    # gigantic perturbation cannot be kept interior
    _, _, _, st = fast.solve_prox_poisson_burg_row(a, b, x_k, np.full(3, 1e19), 1.0, 1e-9, 50)
    assert st == backend.STATUS_DOMAIN


@pytest.mark.skipif(not HAVE_FAST, reason="compiled core not built")
def test_run_level_parity_across_backends(tmp_path):
    """The same CLI run under both backends agrees to solver tolerance."""
    inst = tmp_path / "p.json"
    make_poisson_instance(15, 5, "interpolation", seed=15).save(inst)
    outs = {}
    for name, force in (("cython", "0"), ("python", "1")):
        out = tmp_path / f"{name}.csv"
        env = {**os.environ, "BSPPA_FORCE_PYTHON": force}
        proc = subprocess.run(
            [sys.executable, "-m", "bsppa.cli", "run", "--instance", str(inst),
             "--variant", "saga", "--kernel", "burg", "--alpha", "0.02",
             "--iters", "150", "--seed", "2", "--out", str(out)],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0, proc.stderr
        outs[name] = out
    from bsppa.traceio import read_trace

    a = read_trace(outs["cython"])
    b = read_trace(outs["python"])
    np.testing.assert_array_equal(a["iteration"], b["iteration"])
    np.testing.assert_allclose(a["objective_gap"], b["objective_gap"],
                               rtol=1e-6, atol=1e-12)


def test_force_python_env(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-c", "import bsppa; print(bsppa.backend_name())"],
        capture_output=True, text=True,
        env={**os.environ, "BSPPA_FORCE_PYTHON": "1"},
    )
    assert proc.stdout.strip() == "python"
