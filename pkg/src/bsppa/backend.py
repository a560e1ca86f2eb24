"""Selection of the compiled core.

The Cython extension is preferred when it imported cleanly; setting the
environment variable BSPPA_FORCE_PYTHON=1 before import forces the NumPy
fallback. Results agree between backends up to float summation order, so
the determinism contract is per (platform, backend).
"""

import os

from . import _burg_ref

FALLBACK_NAME = "python"

if os.environ.get("BSPPA_FORCE_PYTHON", "") not in ("", "0"):
    _impl = _burg_ref
    BACKEND = FALLBACK_NAME
else:
    try:
        from . import _burg_fast as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _burg_ref
        BACKEND = FALLBACK_NAME

STATUS_OK = _burg_ref.STATUS_OK
STATUS_NO_PROGRESS = _burg_ref.STATUS_NO_PROGRESS
STATUS_DOMAIN = _burg_ref.STATUS_DOMAIN


def solve_prox_poisson_burg_row(a, b, x_k, e, alpha, tol, max_iter):
    return _impl.solve_prox_poisson_burg_row(a, b, x_k, e, alpha, tol, max_iter)


def backend_name():
    return BACKEND


def implementations():
    """(name, module) pairs of every available backend, for benchmarks."""
    pairs = [(FALLBACK_NAME, _burg_ref)]
    if BACKEND == "cython":
        pairs.append(("cython", _impl))
    return pairs
