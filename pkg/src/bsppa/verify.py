"""Executable property suite.

Each check samples random inputs, measures the worst violation of an
identity or inequality the algorithms rely on, and reports a counterexample
when the stated tolerance is exceeded. The CLI `verify` subcommand runs the
whole battery and emits a machine-readable report.
"""

import time

import numpy as np

from .estimators import make_estimator
from .kernels import bregman_definitional, get_kernel
from .problems import make_poisson_instance
from .prox import InnerSolverConfig, solve_prox_inexact, subproblem_grad
from .runner import RunConfig, run_unified

REPORT_SCHEMA = "bsppa-verify-1"

TOL_IDENTITY = 1e-9
TOL_EXACT = 1e-10
TOL_ENUMERATION = 1e-12
TOL_INEQUALITY = 1e-9


def _sample_point(kernel, d, rng):
    if kernel.domain_kind == "strictly-positive-orthant":
        return rng.uniform(0.1, 10.0, d)
    return rng.normal(0.0, 3.0, d)


def _result(name, tolerance, samples, worst, counterexample, started):
    return {
        "name": name,
        "passed": bool(worst <= tolerance),
        "tolerance": tolerance,
        "samples": samples,
        "max_violation": float(worst),
        "counterexample": counterexample,
        "seconds": round(time.perf_counter() - started, 4),
    }


def check_three_points(kernel, samples=1000, d=6, rng=None):
    """|D_h(x,z) - D_h(x,y) - D_h(y,z) - <grad h(y) - grad h(z), x - y>| small."""
    rng = rng or np.random.default_rng(0)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(samples):
        x, y, z = (_sample_point(kernel, d, rng) for _ in range(3))
        lhs = kernel.divergence(x, z) - kernel.divergence(x, y) - kernel.divergence(y, z)
        rhs = float(np.dot(kernel.mirror(y) - kernel.mirror(z), x - y))
        err = abs(lhs - rhs)
        if err > worst:
            worst, witness = err, {"x": x.tolist(), "y": y.tolist(), "z": z.tolist()}
    name = f"three_points_identity[{kernel.name}]"
    ce = witness if worst > TOL_IDENTITY else None
    return _result(name, TOL_IDENTITY, samples, worst, ce, started)


def check_duality(kernel, samples=1000, d=6, rng=None):
    """D_h(x, y) = D_{h*}(grad h(y), grad h(x))."""
    rng = rng or np.random.default_rng(0)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(samples):
        x = _sample_point(kernel, d, rng)
        y = _sample_point(kernel, d, rng)
        err = abs(kernel.divergence(x, y) - kernel.dual_divergence(kernel.mirror(y), kernel.mirror(x)))
        if err > worst:
            worst, witness = err, {"x": x.tolist(), "y": y.tolist()}
    name = f"duality_identity[{kernel.name}]"
    ce = witness if worst > TOL_IDENTITY else None
    return _result(name, TOL_IDENTITY, samples, worst, ce, started)


def check_closed_form_matches_definition(kernel, samples=1000, d=6, rng=None):
    """Closed-form divergence equals the three-term definition."""
    rng = rng or np.random.default_rng(0)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(samples):
        x = _sample_point(kernel, d, rng)
        y = _sample_point(kernel, d, rng)
        err = abs(kernel.divergence(x, y) - bregman_definitional(kernel, x, y))
        if err > worst:
            worst, witness = err, {"x": x.tolist(), "y": y.tolist()}
    name = f"divergence_definition[{kernel.name}]"
    ce = witness if worst > TOL_IDENTITY else None
    return _result(name, TOL_IDENTITY, samples, worst, ce, started)


def check_midpoint_bound(kernel, samples=1000, d=6, rng=None):
    """Averaging two dual displacements never increases the divergence:

    D_h(x, x+) <= (D_{h*}(grad h(x1+), grad h(x)) + D_{h*}(grad h(x2+), grad h(x))) / 2

    with grad h(x+) the average of grad h(x1+) and grad h(x2+). Sampling
    constructs x1+, x2+ in-domain, so the averaged dual point is too.
    """
    rng = rng or np.random.default_rng(0)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(samples):
        x = _sample_point(kernel, d, rng)
        x1 = _sample_point(kernel, d, rng)
        x2 = _sample_point(kernel, d, rng)
        ux = kernel.mirror(x)
        u1, u2 = kernel.mirror(x1), kernel.mirror(x2)
        xp = kernel.inverse_mirror(0.5 * (u1 + u2))
        lhs = kernel.divergence(x, xp)
        rhs = 0.5 * (kernel.dual_divergence(u1, ux) + kernel.dual_divergence(u2, ux))
        err = lhs - rhs
        if err > worst:
            worst, witness = err, {"x": x.tolist(), "x1_plus": x1.tolist(), "x2_plus": x2.tolist()}
    name = f"midpoint_bound[{kernel.name}]"
    ce = witness if worst > TOL_IDENTITY else None
    return _result(name, TOL_IDENTITY, samples, worst, ce, started)


def check_variance_decomposition(kernel, trials=200, d=4, max_atoms=8, rng=None):
    """E[D_{h*}(X, u)] = D_{h*}(E[X], u) + E[D_{h*}(X, E[X])] for X with
    finite support, by exact enumeration over the atoms."""
    rng = rng or np.random.default_rng(0)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(trials):
        atoms = int(rng.integers(2, max_atoms + 1))
        xs = [kernel.mirror(_sample_point(kernel, d, rng)) for _ in range(atoms)]
        u = kernel.mirror(_sample_point(kernel, d, rng))
        w = rng.uniform(0.2, 1.0, atoms)
        w /= w.sum()
        mean = np.sum([wi * xi for wi, xi in zip(w, xs)], axis=0)
        lhs = sum(wi * kernel.dual_divergence(xi, u) for wi, xi in zip(w, xs))
        rhs = kernel.dual_divergence(mean, u) + sum(
            wi * kernel.dual_divergence(xi, mean) for wi, xi in zip(w, xs)
        )
        err = abs(lhs - rhs)
        if err > worst:
            worst, witness = err, {"atoms": [x.tolist() for x in xs], "weights": w.tolist(), "u": u.tolist()}
    name = f"variance_decomposition[{kernel.name}]"
    ce = witness if worst > TOL_EXACT else None
    return _result(name, TOL_EXACT, trials, worst, ce, started)


def _poisson_component_bregman_all(problem, x, y):
    """D_{f_i}(x, y) for every component, from values and gradients."""
    tx = problem.A @ x
    ty = problem.A @ y
    b = problem.b
    vals_x = b * np.log(b / tx) - b + tx
    vals_y = b * np.log(b / ty) - b + ty
    lin = (1.0 - b / ty) * (problem.A @ (x - y))
    return vals_x - vals_y - lin


def check_relative_smoothness(problem=None, samples=1000, rng=None):
    """D_{f_i}(x, y) <= L D_h(x, y) with L = max_i b_i, Burg kernel."""
    rng = rng or np.random.default_rng(0)
    problem = problem or make_poisson_instance(50, 20, "interpolation", seed=20)
    kernel = get_kernel("burg")
    started = time.perf_counter()
    L = problem.rel_smoothness_L
    worst, witness = -np.inf, None
    for _ in range(samples):
        x = rng.uniform(0.1, 10.0, problem.d)
        y = rng.uniform(0.1, 10.0, problem.d)
        df = _poisson_component_bregman_all(problem, x, y)
        err = float(np.max(df) - L * kernel.divergence(x, y))
        if err > worst:
            worst, witness = err, {"x": x.tolist(), "y": y.tolist(), "i": int(np.argmax(df))}
    ce = witness if worst > TOL_INEQUALITY else None
    return _result("relative_smoothness[poisson/burg]", TOL_INEQUALITY, samples, worst, ce, started)


def check_component_convexity(problem=None, samples=1000, rng=None):
    """D_{f_i}(x, y) >= 0 for every component."""
    rng = rng or np.random.default_rng(0)
    problem = problem or make_poisson_instance(50, 20, "interpolation", seed=20)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(samples):
        x = rng.uniform(0.1, 10.0, problem.d)
        y = rng.uniform(0.1, 10.0, problem.d)
        df = _poisson_component_bregman_all(problem, x, y)
        err = float(-np.min(df))
        if err > worst:
            worst, witness = err, {"x": x.tolist(), "y": y.tolist(), "i": int(np.argmin(df))}
    ce = witness if worst > TOL_INEQUALITY else None
    return _result("component_convexity[poisson]", TOL_INEQUALITY, samples, worst, ce, started)


def check_gradient_mean(problem=None, samples=50, rng=None):
    """full_grad equals the arithmetic mean of the component gradients."""
    rng = rng or np.random.default_rng(0)
    problem = problem or make_poisson_instance(50, 20, "interpolation", seed=20)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for _ in range(samples):
        x = rng.uniform(0.1, 10.0, problem.d)
        mean = np.mean([problem.component_grad(i, x) for i in range(problem.n)], axis=0)
        err = float(np.max(np.abs(mean - problem.full_grad(x))))
        if err > worst:
            worst, witness = err, {"x": x.tolist()}
    ce = witness if worst > TOL_ENUMERATION else None
    return _result("gradient_mean_identity", TOL_ENUMERATION, samples, worst, ce, started)


def _advance(problem, kernel, estimator, x, steps, alpha, rng):
    """Drive the sampled proximal iteration to produce a reachable state."""
    cfg = InnerSolverConfig(tolerance=1e-10, max_inner_iterations=500)
    for _ in range(steps):
        i_k = int(rng.integers(problem.n))
        e = estimator.compute_e(problem, i_k, x)
        res = solve_prox_inexact(kernel, problem, i_k, x, e, alpha, cfg)
        estimator.update(problem, i_k, x)
        x = res.point
    return x


def _fresh_state(problem, kernel, variant, rng, alpha=None):
    x0 = np.ones(problem.d)
    est = make_estimator(
        variant,
        problem,
        x0,
        lsvrg_p=0.3,
        svrp_m=max(2, problem.n // 2),
        retain_points=True,
        eps_rng=np.random.default_rng(rng.integers(2**63)),
        xi_rng=np.random.default_rng(rng.integers(2**63)),
    )
    alpha = alpha or 0.5 / problem.rel_smoothness_L
    x = _advance(problem, kernel, est, x0, int(rng.integers(0, 30)), alpha, rng)
    return est, x


def check_unbiasedness(states=100, rng=None):
    """Enumerating the sampled index, every estimator's e_k averages to zero."""
    rng = rng or np.random.default_rng(0)
    problem = make_poisson_instance(8, 5, "interpolation", seed=8)
    kernel = get_kernel(problem.kernel_name)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    variants = ("none", "saga", "lsvrg", "svrp")
    for s in range(states):
        variant = variants[s % len(variants)]
        est, x = _fresh_state(problem, kernel, variant, rng)
        mean_e = np.mean(
            [est.compute_e(problem, i, x) for i in range(problem.n)], axis=0
        )
        err = float(np.max(np.abs(mean_e)))
        if err > worst:
            worst, witness = err, {"variant": variant, "state_index": s}
    ce = witness if worst > TOL_ENUMERATION else None
    return _result("estimator_unbiasedness", TOL_ENUMERATION, states, worst, ce, started)


def _sigma_from_anchors(problem, kernel, anchors, xstar):
    L = problem.rel_smoothness_L
    total = 0.0
    for i in range(problem.n):
        u = kernel.mirror(anchors[i])
        shift = (problem.component_grad(i, anchors[i]) - problem.component_grad(i, xstar)) / L
        total += kernel.dual_divergence(u - shift, u)
    return 2.0 * L * L * total / problem.n


def check_sigma_recursion(states=40, rng=None):
    """One-step expectation of sigma^2 contracts:

    saga:  E[sigma_{k+1}^2] <= (1 - 1/n) sigma_k^2 + (2L/n) D_F(x_k, x*)
    lsvrg: E[sigma_{k+1}^2] <= (1 - p) sigma_k^2 + 2 p L D_F(x_k, x*)

    checked by exact enumeration over the sampled index (and the anchor coin
    for the loopless variant).
    """
    rng = rng or np.random.default_rng(0)
    problem = make_poisson_instance(8, 5, "interpolation", seed=8)
    kernel = get_kernel(problem.kernel_name)
    xstar = problem.minimizer_xstar
    L = problem.rel_smoothness_L
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for s in range(states):
        variant = ("saga", "lsvrg")[s % 2]
        est, x = _fresh_state(problem, kernel, variant, rng)
        sigma = est.sigma_sq(problem, kernel, xstar)
        d_F = problem.full_value(x) - problem.full_value(xstar) - float(
            np.dot(problem.full_grad(xstar), x - xstar)
        )
        anchors = np.array(est.anchor_points())
        if variant == "saga":
            expected = 0.0
            for j in range(problem.n):
                moved = anchors.copy()
                moved[j] = x
                expected += _sigma_from_anchors(problem, kernel, moved, xstar)
            expected /= problem.n
            bound = (1.0 - 1.0 / problem.n) * sigma + (2.0 * L / problem.n) * d_F
        else:
            p = est.p
            at_x = _sigma_from_anchors(
                problem, kernel, np.tile(x, (problem.n, 1)), xstar
            )
            expected = (1.0 - p) * sigma + p * at_x
            bound = (1.0 - p) * sigma + 2.0 * p * L * d_F
        err = expected - bound
        if err > worst:
            worst, witness = err, {"variant": variant, "state_index": s}
    ce = witness if worst > TOL_INEQUALITY else None
    return _result("sigma_recursion", TOL_INEQUALITY, states, worst, ce, started)


def check_prox_certificate(queries=100, rng=None):
    """Accepted prox points satisfy the stationarity residual bound."""
    rng = rng or np.random.default_rng(0)
    problem = make_poisson_instance(12, 6, "interpolation", seed=12)
    kernel = get_kernel("burg")
    cfg = InnerSolverConfig(tolerance=1e-9)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for s in range(queries):
        i = int(rng.integers(problem.n))
        x_k = rng.uniform(0.3, 3.0, problem.d)
        e = rng.normal(0.0, 0.1, problem.d)
        alpha = float(rng.uniform(0.01, 0.5 / problem.rel_smoothness_L))
        res = solve_prox_inexact(kernel, problem, i, x_k, e, alpha, cfg)
        g = subproblem_grad(kernel, problem, i, x_k, e, alpha, res.point)
        err = float(np.linalg.norm(g)) - cfg.tolerance
        if err > worst:
            worst, witness = err, {"i": i, "x_k": x_k.tolist(), "alpha": alpha}
    ce = witness if worst > 0 else None
    return _result("prox_stationarity_certificate", 0.0, queries, worst, ce, started)


def check_positivity(rng=None):
    """Every recorded iterate of a Burg run stays strictly positive."""
    rng = rng or np.random.default_rng(0)
    problem = make_poisson_instance(10, 4, "interpolation", seed=10)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for variant in ("none", "saga", "lsvrg", "svrp"):
        config = RunConfig(
            variant=variant,
            kernel="burg",
            alpha0=0.3 / problem.rel_smoothness_L,
            iterations=3 * problem.n,
            seed=int(rng.integers(2**31)),
            retain_iterates=True,
        )
        trace = run_unified(config, problem)
        err = float(-np.min(trace.iterates))
        if err > worst:
            worst, witness = err, {"variant": variant}
    ce = witness if worst >= 0 else None
    return _result("positivity_preservation", 0.0, 4, worst, ce, started)


def check_reduction_identities(rng=None):
    """Degenerate settings coincide: the double-loop variant with m = 1 and
    the loopless variant with p = 1 produce identical iterate sequences on a
    shared sampling stream."""
    started = time.perf_counter()
    problem = make_poisson_instance(6, 4, "interpolation", seed=6)
    base = dict(
        kernel="burg",
        alpha0=0.2 / problem.rel_smoothness_L,
        iterations=40,
        seed=123,
        retain_iterates=True,
        record_cadence=1,
    )
    t_lsvrg = run_unified(RunConfig(variant="lsvrg", lsvrg_p=1.0, **base), problem)
    t_svrp = run_unified(
        RunConfig(variant="svrp", svrp_m=1, svrp_outer="random_index", **base), problem
    )
    worst = float(np.max(np.abs(t_lsvrg.iterates - t_svrp.iterates)))
    ce = None if worst == 0.0 else {"first_diff": int(np.argmax(np.any(t_lsvrg.iterates != t_svrp.iterates, axis=1)))}
    return _result("reduction_svrp_m1_equals_lsvrg_p1", 0.0, 40, worst, ce, started)


def check_implicit_fixed_point(rng=None):
    """With all anchors at x* on an interpolation instance, x* is a fixed
    point of every variant's implicit step."""
    rng = rng or np.random.default_rng(0)
    problem = make_poisson_instance(8, 5, "interpolation", seed=8)
    kernel = get_kernel("burg")
    xstar = problem.minimizer_xstar
    cfg = InnerSolverConfig(tolerance=1e-9)
    started = time.perf_counter()
    worst, witness = -np.inf, None
    for variant in ("none", "saga", "lsvrg", "svrp"):
        est = make_estimator(
            variant, problem, xstar,
            lsvrg_p=0.5, svrp_m=4,
            eps_rng=np.random.default_rng(1), xi_rng=np.random.default_rng(2),
        )
        for i in range(problem.n):
            e = est.compute_e(problem, i, xstar)
            res = solve_prox_inexact(kernel, problem, i, xstar, e, 0.2, cfg)
            err = float(np.max(np.abs(res.point - xstar)))
            if err > worst:
                worst, witness = err, {"variant": variant, "i": i}
    ce = witness if worst > 0 else None
    return _result("implicit_fixed_point", 0.0, 4 * problem.n, worst, ce, started)


def run_verification(seed=0, samples=1000):
    """Run the full battery; returns the report dictionary."""
    rng = np.random.default_rng(seed)
    properties = []
    for kernel_name in ("euclidean", "burg"):
        kernel = get_kernel(kernel_name)
        properties.append(check_three_points(kernel, samples, rng=np.random.default_rng(rng.integers(2**63))))
        properties.append(check_duality(kernel, samples, rng=np.random.default_rng(rng.integers(2**63))))
        properties.append(check_closed_form_matches_definition(kernel, samples, rng=np.random.default_rng(rng.integers(2**63))))
        properties.append(check_midpoint_bound(kernel, samples, rng=np.random.default_rng(rng.integers(2**63))))
        properties.append(check_variance_decomposition(kernel, max(trials_for(samples), 50), rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_relative_smoothness(samples=samples, rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_component_convexity(samples=samples, rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_gradient_mean(rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_unbiasedness(rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_sigma_recursion(rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_prox_certificate(rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_positivity(rng=np.random.default_rng(rng.integers(2**63))))
    properties.append(check_reduction_identities())
    properties.append(check_implicit_fixed_point())
    return {
        "schema": REPORT_SCHEMA,
        "seed": seed,
        "samples": samples,
        "all_passed": all(p["passed"] for p in properties),
        "properties": properties,
    }


def trials_for(samples):
    return max(samples // 5, 1)
