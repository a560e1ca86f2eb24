"""Deterministic full-batch reference solver.

Used once per non-interpolation instance to cache a trustworthy F*: plain
Bregman gradient descent with a backtracking line search, run until the
gradient is at machine-noise level. Near a nondegenerate interior minimum
the value error is of the order of the squared gradient norm, far below
any gap the stochastic runs can resolve.
"""

import logging

import numpy as np

from .errors import BsppaError
from .kernels import get_kernel

log = logging.getLogger(__name__)


def reference_minimize(problem, grad_tol=1e-12, max_steps=1_000_000, x0=None):
    """Minimize problem.full_value over the kernel domain.

    Returns (x, fvalue, info); info carries steps taken, the final gradient
    sup-norm and a converged flag.
    """
    kernel = get_kernel(problem.kernel_name)
    if x0 is None:
        x0 = np.ones(problem.d) if kernel.name == "burg" else np.zeros(problem.d)
    x = np.asarray(x0, dtype=float).copy()
    fx = problem.full_value(x)
    # steps at or below 1/L descend by relative smoothness; the objective
    # comparison (unreliable at float noise) only gates grown steps
    tau_safe = 1.0 / max(problem.rel_smoothness_L, 1e-12)
    tau = tau_safe
    steps = 0
    gnorm = np.inf
    while steps < max_steps:
        g = problem.full_grad(x)
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= grad_tol:
            break
        accepted = False
        t = tau
        for _ in range(80):
            y = kernel.mirror(x) - t * g
            if not kernel.in_dual_domain(y):
                t *= 0.5
                continue
            x_try = kernel.inverse_mirror(y)
            try:
                f_try = problem.full_value(x_try)
            except BsppaError:
                t *= 0.5
                continue
            if t <= tau_safe or f_try <= fx:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        grew = t == tau
        x, fx = x_try, f_try
        tau = t * 1.5 if grew else t
        steps += 1
    converged = gnorm <= grad_tol
    if not converged:
        log.warning(
            "reference solve stopped after %d steps with grad sup-norm %.3e",
            steps,
            gnorm,
        )
    if kernel.name == "burg" and float(np.min(x)) < 1e-6:
        log.warning(
            "reference minimizer is close to the domain boundary "
            "(min coordinate %.3e)",
            float(np.min(x)),
        )
    info = {"steps": steps, "grad_sup_norm": gnorm, "converged": converged}
    return x, fx, info


def attach_reference_fstar(problem, grad_tol=1e-12, max_steps=1_000_000):
    """Cache F* (and the reference minimizer) on a non-interpolation instance."""
    x, fx, info = reference_minimize(problem, grad_tol=grad_tol, max_steps=max_steps)
    problem.optimal_value_Fstar = fx
    problem.reference_xstar = x
    return info
