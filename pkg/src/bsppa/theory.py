"""Calculators for the convergence-rate constants.

Everything here is plain arithmetic on the problem constants: the gain
bound, per-variant stepsize caps, contraction factors, and the exact
enumeration of the variance proxy sigma^2 and of the (always nonpositive)
correction term N_k.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, InvalidConfig, MissingReference


@dataclass
class RateConstants:
    """Constants a rate statement needs.

    gamma_h is the kernel symmetry coefficient (1 for Euclidean; user
    supplied otherwise). G0 is the gain constant, assumed constant along the
    run; M0 defaults to (n+1) G0, which makes G0/M0 = 1/(n+1).
    """

    L: float
    n: int
    mu: float = 0.0
    beta: float = 0.0
    gamma_h: float = 1.0
    G0: float = 1.0
    M0: float = None
    p: float = None
    m: int = None

    def __post_init__(self):
        if self.L <= 0:
            raise InvalidConfig("relative smoothness constant must be positive")
        if self.n < 1:
            raise InvalidConfig("component count must be at least 1")
        for name in ("mu", "beta", "G0"):
            if getattr(self, name) < 0:
                raise InvalidConfig(f"{name} must be nonnegative")
        if not 0 <= self.gamma_h <= 1:
            raise InvalidConfig("symmetry coefficient must lie in [0, 1]")
        if self.M0 is None:
            self.M0 = (self.n + 1) * self.G0
        if self.M0 <= 0:
            raise InvalidConfig("M0 must be positive")
        if self.p is not None and not 0 < self.p <= 1:
            raise InvalidConfig("p must be in (0, 1]")
        if self.m is not None and self.m < 1:
            raise InvalidConfig("m must be at least 1")


def gain_bound(M_hessian, L_smooth, dist_yx, norm_v):
    """Gain bound 1 + 2 M L (||y - x|| + ||v||) for an L-smooth kernel whose
    dual Hessian is M-smooth. Nondecreasing in every argument, equal to 1 at
    zero arguments."""
    if min(M_hessian, L_smooth, dist_yx, norm_v) < 0:
        raise InvalidConfig("gain arguments must be nonnegative")
    return 1.0 + 2.0 * M_hessian * L_smooth * (dist_yx + norm_v)


def variance_constants(variant, c):
    """(A, B, C, rho) of the variance assumptions for a variant."""
    if variant == "none":
        return 0.0, 0.0, 0.0, 0.0
    A = 2.0 * c.L * c.G0
    B = c.G0
    if variant == "saga":
        return A, B, 2.0 * c.L / c.n, 1.0 / c.n
    if variant == "lsvrg":
        if c.p is None:
            raise InvalidConfig("lsvrg constants need the anchor probability p")
        return A, B, 2.0 * c.p * c.L, c.p
    if variant == "svrp":
        return A, B, 0.0, 0.0
    raise InvalidConfig(f"unknown variant {variant!r}")


def stepsize_cap(variant, c):
    """Strict upper bound on admissible constant stepsizes.

    The vanilla variant has no cap (returns inf); the double-loop variant
    uses its own 1/(4 L G0) bound; the single-loop variants use the generic
    1/(A + M0 C) bound, which expands to 1/(2L(G0 + M0/n)) and
    1/(2L(G0 + M0 p)) respectively.
    """
    if variant == "none":
        return np.inf
    if variant == "svrp":
        return 1.0 / (4.0 * c.L * c.G0)
    A, _, C, _ = variance_constants(variant, c)
    return 1.0 / (A + c.M0 * C)


def recommended_stepsize(variant, c):
    """Safe constant choice strictly below the cap: 1/(1/cap + 1)."""
    cap = stepsize_cap(variant, c)
    if not np.isfinite(cap):
        raise InvalidConfig("the vanilla variant has no capped recommendation")
    return 1.0 / (1.0 / cap + 1.0)


def contraction_factor(variant, c, alpha):
    """Per-step (per-epoch for the double-loop variant) contraction factor.

    Raises InvalidConfig when the formula does not give a value in (0, 1),
    in which case the stepsize, M0 or the epoch length must be adjusted.
    """
    if alpha <= 0:
        raise InvalidConfig("stepsize must be positive")
    if variant == "none":
        if c.beta <= 0:
            raise InvalidConfig(
                "vanilla contraction requires per-component relative strong "
                "convexity beta > 0"
            )
        return 1.0 / (1.0 + c.beta * alpha)
    if c.mu <= 0:
        raise InvalidConfig("variance-reduced contraction requires mu > 0")
    if c.gamma_h <= 0:
        raise InvalidConfig("contraction requires a positive symmetry coefficient")
    if variant == "svrp":
        if c.m is None:
            raise InvalidConfig("the double-loop factor needs the epoch length m")
        shrink = 1.0 - 2.0 * c.L * alpha * c.G0
        if shrink <= 0:
            raise InvalidConfig("stepsize too large: need alpha < 1/(2 L G0)")
        q = 1.0 / (c.gamma_h * c.mu * alpha * shrink * c.m) + (
            2.0 * c.L * alpha * c.G0
        ) / shrink
        if not 0.0 < q < 1.0:
            raise InvalidConfig(
                f"per-epoch factor {q:.4f} is not in (0, 1); increase m or shrink alpha"
            )
        return q
    A, B, C, rho = variance_constants(variant, c)
    cap = stepsize_cap(variant, c)
    if alpha >= cap:
        raise InvalidConfig(f"stepsize {alpha} is not below the cap {cap:.6g}")
    q = max(
        1.0 - alpha * c.gamma_h * c.mu * (1.0 - alpha * (A + c.M0 * C)),
        1.0 + B / c.M0 - rho,
    )
    if not 0.0 < q < 1.0:
        raise InvalidConfig(f"contraction factor {q:.6f} is not in (0, 1)")
    return q


def sigma_sq_diagnostic(estimator, problem, kernel, xstar):
    """Exact enumeration of the variance proxy at the estimator's anchors."""
    return estimator.sigma_sq(problem, kernel, xstar)


def sigma_sq_smoothness_bound(estimator, problem, xstar):
    """Upper bound 2 L (1/n) sum_i D_{f_i}(anchor_i, x*) on the proxy."""
    if xstar is None:
        raise MissingReference("the smoothness bound requires a known minimizer")
    anchors = estimator.anchor_points()
    if anchors is None:
        raise InvalidConfig("the smoothness bound needs retained anchor points")
    L = problem.rel_smoothness_L
    total = sum(
        problem.component_bregman(i, anchors[i], xstar) for i in range(problem.n)
    )
    return 2.0 * L * total / problem.n


MAX_ENUMERATION_N = 32


def nk_diagnostic(estimator, problem, kernel, x_k, alpha):
    """Correction term -D_{h*}(grad h(x_k), grad h(x_k) - E[zeta_k]) / (2 alpha^2).

    E[zeta_k] is 2 alpha times the mean anchor gradient, computable by
    enumeration; supported for n <= 32 only (returns None above).
    """
    if problem.n > MAX_ENUMERATION_N:
        return None
    anchors = estimator.anchor_points()
    if anchors is None:
        raise InvalidConfig("the N_k diagnostic needs retained anchor points")
    mean_anchor_grad = np.mean(
        [problem.component_grad(i, anchors[i]) for i in range(problem.n)], axis=0
    )
    u = kernel.mirror(x_k)
    shifted = u - 2.0 * alpha * mean_anchor_grad
    if not kernel.in_dual_domain(shifted):
        raise DomainViolation("shifted dual point left int dom h* in the N_k diagnostic")
    return -kernel.dual_divergence(u, shifted) / (2.0 * alpha**2)
