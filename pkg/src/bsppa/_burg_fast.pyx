# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled core: Burg-kernel prox of a single Poisson component.

Mirrors _burg_ref.solve_prox_poisson_burg_row iteration for iteration; only
float summation order may differ from the NumPy fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()

DEF STATUS_OK = 0
DEF STATUS_NO_PROGRESS = 1
DEF STATUS_DOMAIN = 2

DEF GROWTH = 1.25
DEF MAX_HALVINGS = 60


cdef double _value(double[::1] a, double b, double[::1] e, double[::1] x,
                   double[::1] x_k, double[::1] inv_xk, double inv_alpha,
                   double t) nogil:
    cdef Py_ssize_t j, d = x.shape[0]
    cdef double breg = 0.0, lin = 0.0, ratio
    for j in range(d):
        ratio = x[j] * inv_xk[j]
        breg += ratio - log(ratio) - 1.0
        lin += e[j] * (x[j] - x_k[j])
    return b * (log(b) - log(t)) - b + t - lin + inv_alpha * breg


def solve_prox_poisson_burg_row(double[::1] a, double b, double[::1] x_k,
                                double[::1] e, double alpha, double tol,
                                int max_iter):
    cdef Py_ssize_t d = x_k.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_arr = np.array(x_k, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xt_arr = np.empty(d, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g_arr = np.empty(d, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] invk_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] x_try = xt_arr
    cdef double[::1] g = g_arr
    cdef double[::1] inv_xk = invk_arr

    cdef double inv_alpha = 1.0 / alpha
    cdef double t_cur = 0.0, t_try = 0.0
    cdef double psi, psi_try = 0.0, tau, tau_safe, step, residual, gj, y, coeff
    cdef Py_ssize_t j
    cdef int iters = 0, halvings, status
    cdef bint accepted, saw_interior, grew

    for j in range(d):
        inv_xk[j] = 1.0 / x[j]
        t_cur += a[j] * x[j]
    psi = _value(a, b, e, x, x_k, inv_xk, inv_alpha, t_cur)
    # descent is guaranteed at or below the relative-smoothness step, so
    # only grown steps must pass the objective comparison
    tau_safe = alpha / (1.0 + alpha * b)
    tau = tau_safe

    while True:
        coeff = 1.0 - b / t_cur
        residual = 0.0
        for j in range(d):
            gj = a[j] * coeff - e[j] + inv_alpha * (inv_xk[j] - 1.0 / x[j])
            g[j] = gj
            residual += gj * gj
        residual = sqrt(residual)
        if residual <= tol:
            return x_arr, residual, iters, STATUS_OK
        if iters >= max_iter:
            return x_arr, residual, iters, STATUS_NO_PROGRESS

        step = tau
        accepted = False
        saw_interior = False
        for halvings in range(MAX_HALVINGS + 1):
            t_try = 0.0
            for j in range(d):
                y = -1.0 / x[j] - step * g[j]
                if y >= 0.0:
                    t_try = -1.0
                    break
                x_try[j] = -1.0 / y
                t_try += a[j] * x_try[j]
            if t_try >= 0.0:
                saw_interior = True
                psi_try = _value(a, b, e, x_try, x_k, inv_xk, inv_alpha, t_try)
                if step <= tau_safe or psi_try <= psi:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            status = STATUS_NO_PROGRESS if saw_interior else STATUS_DOMAIN
            return x_arr, residual, iters, status
        grew = step == tau
        for j in range(d):
            x[j] = x_try[j]
        t_cur = t_try
        psi = psi_try
        if grew:
            tau = step * GROWTH
            if tau > alpha:
                tau = alpha
        else:
            tau = step
        iters += 1
