"""NumPy implementation of the hot inner loop: the Burg-kernel prox of a
single Poisson component. The compiled twin in _burg_fast.pyx follows the
same iteration step for step; only float summation order may differ.

Status codes: 0 solved, 1 residual target unmet, 2 iterate could not be
kept interior.
"""

import numpy as np

STATUS_OK = 0
STATUS_NO_PROGRESS = 1
STATUS_DOMAIN = 2

GROWTH = 1.25
MAX_HALVINGS = 60


def solve_prox_poisson_burg_row(a, b, x_k, e, alpha, tol, max_iter):
    """Minimize b log(b/a.x) - b + a.x - e.(x - x_k) + D_burg(x, x_k)/alpha.

    Mirror descent under the Burg kernel, warm-started at x_k, with
    backtracking on the subproblem objective and on domain exits.
    Returns (x, residual, iterations, status).
    """
    x = np.array(x_k, dtype=float)
    inv_xk = 1.0 / x
    inv_alpha = 1.0 / alpha

    def value(z, t):
        ratio = z * inv_xk
        breg = float(np.sum(ratio - np.log(ratio) - 1.0))
        return (
            b * (np.log(b) - np.log(t))
            - b
            + t
            - float(np.dot(e, z - x_k))
            + inv_alpha * breg
        )

    t_cur = float(np.dot(a, x))
    psi = value(x, t_cur)
    # descent is guaranteed at or below the relative-smoothness step, so
    # only grown steps must pass the objective comparison
    tau_safe = alpha / (1.0 + alpha * b)
    tau = tau_safe
    iters = 0
    while iters < max_iter:
        g = a * (1.0 - b / t_cur) - e + inv_alpha * (inv_xk - 1.0 / x)
        residual = float(np.sqrt(np.dot(g, g)))
        if residual <= tol:
            return x, residual, iters, STATUS_OK
        step = tau
        accepted = False
        saw_interior = False
        for _ in range(MAX_HALVINGS + 1):
            y = -1.0 / x - step * g
            if np.all(y < 0.0):
                saw_interior = True
                x_try = -1.0 / y
                t_try = float(np.dot(a, x_try))
                psi_try = value(x_try, t_try)
                if step <= tau_safe or psi_try <= psi:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            status = STATUS_NO_PROGRESS if saw_interior else STATUS_DOMAIN
            return x, residual, iters, status
        grew = step == tau
        x, t_cur, psi = x_try, t_try, psi_try
        tau = min(step * GROWTH, alpha) if grew else step
        iters += 1
    g = a * (1.0 - b / t_cur) - e + inv_alpha * (inv_xk - 1.0 / x)
    residual = float(np.sqrt(np.dot(g, g)))
    status = STATUS_OK if residual <= tol else STATUS_NO_PROGRESS
    return x, residual, iters, status
