"""Independent oracles used by the tests: finite differences, bisection,
and brute-force re-evaluations. These stay separate from the library code
they check."""

import numpy as np


def central_difference_grad(f, x, rel_step=1e-6):
    """Central finite differences with per-coordinate step h_j = step*(1+|x_j|)."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for j in range(x.size):
        h = rel_step * (1.0 + abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        g[j] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def bisect_root(fn, lo, hi, iterations=200):
    """Plain bisection for a scalar root with fn(lo) and fn(hi) of opposite sign."""
    flo = fn(lo)
    fhi = fn(hi)
    assert flo * fhi <= 0, f"root not bracketed: f({lo})={flo}, f({hi})={fhi}"
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if flo * fmid <= 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def diagonal_prox_by_bisection(a, b, x_k, e, alpha):
    """Root-find every coordinate of the separable diagonal subproblem.

    Coordinate i of component i satisfies
        a (1 - b / (a x)) - e_i + (1/alpha)(1/x_k - 1/x) = 0,
    and every other coordinate j satisfies
        -e_j + (1/alpha)(1/x_k_j - 1/x) = 0.
    """
    d = len(x_k)
    out = np.empty(d)
    for j in range(d):
        if j == 0:
            def fn(x, j=j):
                return a * (1.0 - b / (a * x)) - e[j] + (1.0 / alpha) * (1.0 / x_k[j] - 1.0 / x)
        else:
            def fn(x, j=j):
                return -e[j] + (1.0 / alpha) * (1.0 / x_k[j] - 1.0 / x)
        lo, hi = 1e-9, 1e9
        out[j] = bisect_root(fn, lo, hi)
    return out


def quadratic_euclid_prox(c, x_k, alpha, e=0.0, q=1.0):
    """Closed form for argmin q (x - c)^2 / 2 - e (x - x_k) + (x - x_k)^2 / (2 alpha)."""
    return (x_k / alpha + q * c + e) / (q + 1.0 / alpha)
