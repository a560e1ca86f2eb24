"""Solvers for the perturbed proximal subproblem

    argmin_x  f_i(x) - <e, x - x_k> + D_h(x, x_k) / alpha

and the explicit mirror step. Every accepted solution carries a
stationarity residual ||grad f_i(x) - e + (grad h(x) - grad h(x_k))/alpha||
as its optimality certificate.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import (
    ClosedFormInapplicable,
    InnerSolverDiverged,
    InvalidConfig,
    StepOutOfDomain,
)
from .problems import PoissonProblem

MAX_DOMAIN_HALVINGS = 60
STEP_GROWTH = 1.25


@dataclass(frozen=True)
class InnerSolverConfig:
    tolerance: float = 1e-8
    max_inner_iterations: int = 500
    inner_step_rule: str = "backtracking"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise InvalidConfig("inner tolerance must be positive")
        if self.max_inner_iterations < 1:
            raise InvalidConfig("max_inner_iterations must be at least 1")
        if self.inner_step_rule not in ("fixed", "backtracking"):
            raise InvalidConfig(f"unknown inner_step_rule {self.inner_step_rule!r}")


@dataclass
class ProxResult:
    point: np.ndarray
    stationarity_residual: float
    inner_iterations: int
    method: str


def mirror_step(kernel, x, v, alpha):
    """Explicit update grad(h*)(grad(h)(x) - alpha v).

    Raises StepOutOfDomain when the dual point leaves int dom h*, which
    signals that the stepsize is too large for this direction.
    """
    if alpha <= 0:
        raise InvalidConfig("stepsize must be positive")
    y = kernel.mirror(x) - alpha * np.asarray(v, dtype=float)
    if not kernel.in_dual_domain(y):
        raise StepOutOfDomain(
            f"dual point left int dom h* under the {kernel.name} kernel"
        )
    return kernel.inverse_mirror(y)


def subproblem_value(kernel, problem, i, x_k, e, alpha, x):
    lin = float(np.dot(e, np.asarray(x, dtype=float) - x_k))
    return problem.component_value(i, x) - lin + kernel.divergence(x, x_k) / alpha


def subproblem_grad(kernel, problem, i, x_k, e, alpha, x):
    return (
        problem.component_grad(i, x)
        - e
        + (kernel.mirror(x) - kernel.mirror(x_k)) / alpha
    )


def solve_prox_separable(problem, i, x_k, e, alpha):
    """Closed-form prox for diagonal Poisson instances under Burg.

    Component i touches coordinate i only, so each coordinate solves a
    scalar stationarity equation. Raises ClosedFormInapplicable when a
    required denominator is nonpositive (caller falls back to the inexact
    solver or shrinks alpha).
    """
    if not isinstance(problem, PoissonProblem) or not problem.is_diagonal:
        raise ClosedFormInapplicable("closed form requires a diagonal Poisson instance")
    if alpha <= 0:
        raise InvalidConfig("stepsize must be positive")
    x_k = np.asarray(x_k, dtype=float)
    e = np.asarray(e, dtype=float)
    a = problem.diag
    bi = problem.b[i]
    denom = 1.0 / x_k - alpha * e
    denom[i] = a[i] - e[i] + 1.0 / (alpha * x_k[i])
    if np.any(denom <= 0):
        raise ClosedFormInapplicable(
            "nonpositive denominator in the separable prox; shrink alpha"
        )
    x = 1.0 / denom
    x[i] = (bi + 1.0 / alpha) / denom[i]
    return ProxResult(point=x, stationarity_residual=0.0, inner_iterations=0, method="closed_form")


def _solve_generic(kernel, problem, i, x_k, e, alpha, cfg):
    x = np.array(x_k, dtype=float)
    mirror_xk = kernel.mirror(x_k)
    backtrack = cfg.inner_step_rule == "backtracking"
    # steps at or below the relative-smoothness step descend by construction;
    # the objective comparison only gates grown steps
    tau_safe = 1.0 / (problem.component_smoothness(i) + 1.0 / alpha)
    tau = tau_safe
    psi = subproblem_value(kernel, problem, i, x_k, e, alpha, x)
    iters = 0
    while True:
        g = problem.component_grad(i, x) - e + (kernel.mirror(x) - mirror_xk) / alpha
        residual = float(np.linalg.norm(g))
        if residual <= cfg.tolerance:
            return ProxResult(x, residual, iters, "inexact_descent")
        if iters >= cfg.max_inner_iterations:
            raise InnerSolverDiverged(
                f"stationarity residual {residual:.3e} above tolerance "
                f"{cfg.tolerance:.3e} after {iters} inner iterations",
                residual=residual,
                iterations=iters,
            )
        step = tau
        accepted = False
        saw_interior = False
        for _ in range(MAX_DOMAIN_HALVINGS + 1):
            y = kernel.mirror(x) - step * g
            if kernel.in_dual_domain(y):
                saw_interior = True
                x_try = kernel.inverse_mirror(y)
                psi_try = subproblem_value(kernel, problem, i, x_k, e, alpha, x_try)
                if step <= tau_safe or psi_try <= psi or not backtrack:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            if not saw_interior:
                raise StepOutOfDomain(
                    "inner iterate could not be kept interior after "
                    f"{MAX_DOMAIN_HALVINGS} halvings"
                )
            raise InnerSolverDiverged(
                f"no descent step found at residual {residual:.3e}",
                residual=residual,
                iterations=iters,
            )
        grew = step == tau
        x, psi = x_try, psi_try
        tau = min(step * STEP_GROWTH, alpha) if grew else step
        iters += 1


def _solve_poisson_burg(problem, i, x_k, e, alpha, cfg):
    x, residual, iters, status = backend.solve_prox_poisson_burg_row(
        np.ascontiguousarray(problem.A[i], dtype=float),
        float(problem.b[i]),
        np.ascontiguousarray(x_k, dtype=float),
        np.ascontiguousarray(e, dtype=float),
        float(alpha),
        float(cfg.tolerance),
        int(cfg.max_inner_iterations),
    )
    if status == backend.STATUS_DOMAIN:
        raise StepOutOfDomain(
            f"inner iterate could not be kept interior after {MAX_DOMAIN_HALVINGS} halvings"
        )
    if status == backend.STATUS_NO_PROGRESS:
        raise InnerSolverDiverged(
            f"stationarity residual {residual:.3e} above tolerance "
            f"{cfg.tolerance:.3e} after {iters} inner iterations",
            residual=residual,
            iterations=iters,
        )
    return ProxResult(np.asarray(x), residual, iters, "inexact_descent")


def solve_prox_inexact(kernel, problem, i, x_k, e, alpha, cfg=None):
    """Inexact prox: mirror descent on the subproblem, warm-started at x_k.

    The returned point satisfies the residual certificate at cfg.tolerance
    and never has a worse subproblem objective than the warm start. Poisson
    instances under the Burg kernel take the compiled fast path when it is
    available.
    """
    if alpha <= 0:
        raise InvalidConfig("stepsize must be positive")
    cfg = cfg or InnerSolverConfig()
    if (
        kernel.name == "burg"
        and isinstance(problem, PoissonProblem)
        and cfg.inner_step_rule == "backtracking"
    ):
        return _solve_poisson_burg(problem, i, x_k, e, alpha, cfg)
    return _solve_generic(kernel, problem, i, x_k, e, alpha, cfg)
