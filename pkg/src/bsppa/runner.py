"""Unified outer loop: sample a component, form the perturbation e_k, take
an implicit (proximal) or explicit (mirror-SGD) step, then update the
estimator with the pre-update iterate.

One master seed per run is split into three sub-streams (component
sampling, anchor coin flips, epoch picks), so traces are bit-reproducible
per platform and backend, and variants sharing a seed consume identical
component-index sequences.
"""

import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import (
    ClosedFormInapplicable,
    InnerSolverDiverged,
    InvalidConfig,
    MissingReference,
    StepOutOfDomain,
)
from .estimators import make_estimator
from .kernels import get_kernel
from .prox import InnerSolverConfig, mirror_step, solve_prox_inexact, solve_prox_separable

DIVERGENCE_GAP = 1e12

VARIANTS = ("none", "saga", "lsvrg", "svrp")
SCHEDULES = ("constant", "inv_sqrt", "inv_k")
UPDATE_MODES = ("implicit", "explicit")


@dataclass
class RunConfig:
    variant: str = "none"
    update_mode: str = "implicit"
    kernel: str = "euclidean"
    schedule: str = "constant"
    alpha0: float = 0.1
    iterations: int = 1000
    seed: int = 0
    lsvrg_p: float = None
    svrp_m: int = None
    svrp_outer: str = "random_index"
    inner_tolerance: float = 1e-8
    inner_max_iterations: int = 500
    inner_step_rule: str = "backtracking"
    record_cadence: int = None
    retain_iterates: bool = False
    retain_points: bool = False
    record_sigma: bool = False
    record_variance_proxy: bool = False
    prox_rule: str = "auto"
    x0: list = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"unknown variant {self.variant!r}")
        if self.update_mode not in UPDATE_MODES:
            raise InvalidConfig(f"unknown update mode {self.update_mode!r}")
        if self.schedule not in SCHEDULES:
            raise InvalidConfig(f"unknown stepsize schedule {self.schedule!r}")
        if self.alpha0 <= 0:
            raise InvalidConfig("alpha0 must be positive")
        if self.iterations < 0:
            raise InvalidConfig("iteration budget must be nonnegative")
        if self.lsvrg_p is not None and not 0 < self.lsvrg_p <= 1:
            raise InvalidConfig("lsvrg_p must be in (0, 1]")
        if self.svrp_m is not None and self.svrp_m < 1:
            raise InvalidConfig("svrp_m must be at least 1")
        if self.record_cadence is not None and self.record_cadence < 1:
            raise InvalidConfig("record cadence must be at least 1")
        if self.prox_rule not in ("auto", "inexact", "closed_form"):
            raise InvalidConfig(f"unknown prox rule {self.prox_rule!r}")

    def stepsize(self, k):
        if self.schedule == "constant":
            return self.alpha0
        if self.schedule == "inv_sqrt":
            return self.alpha0 / np.sqrt(k + 1.0)
        return self.alpha0 / (k + 1.0)

    def inner_config(self):
        return InnerSolverConfig(
            tolerance=self.inner_tolerance,
            max_inner_iterations=self.inner_max_iterations,
            inner_step_rule=self.inner_step_rule,
        )

    def resolved(self, problem):
        """Copy with instance-dependent defaults filled in."""
        out = RunConfig(**asdict(self))
        if out.lsvrg_p is None:
            out.lsvrg_p = 1.0 / problem.n
        if out.svrp_m is None:
            out.svrp_m = problem.n
        if out.record_cadence is None:
            out.record_cadence = problem.n
        if out.x0 is None:
            kernel = get_kernel(out.kernel)
            default = np.ones if kernel.domain_kind == "strictly-positive-orthant" else np.zeros
            out.x0 = default(problem.d).tolist()
        return out

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, doc):
        return cls(**doc)


@dataclass
class RunRecord:
    iteration: int
    epoch: float
    objective_gap: float
    bregman_dist_to_xstar: float = None
    sigma_sq: float = None
    stepsize: float = None
    inner_iterations: int = 0
    wallclock_seconds: float = 0.0


@dataclass
class Trace:
    records: list = field(default_factory=list)
    status: str = "completed"
    config: dict = None
    final_x: np.ndarray = None
    iterates: np.ndarray = None
    max_variance_proxy: float = None


def _solve_step(config, kernel, problem, i_k, x, e, alpha, inner_cfg):
    """One implicit step; returns (point, inner_iterations)."""
    use_closed = config.prox_rule == "closed_form" or (
        config.prox_rule == "auto" and problem.is_diagonal and kernel.name == "burg"
    )
    if use_closed:
        try:
            res = solve_prox_separable(problem, i_k, x, e, alpha)
            return res.point, res.inner_iterations
        except ClosedFormInapplicable:
            if config.prox_rule == "closed_form":
                raise
    res = solve_prox_inexact(kernel, problem, i_k, x, e, alpha, inner_cfg)
    return res.point, res.inner_iterations


def run_unified(config, problem):
    """Run the configured variant on a finite-sum problem and trace it.

    Terminal status is "completed", "diverged" (objective gap above 1e12,
    non-finite iterates, or a stuck inner solve), or "domain_exit" (a step
    left the kernel domain unrecoverably). The partial trace is always
    returned.
    """
    config = config.resolved(problem)
    kernel = get_kernel(config.kernel)
    if problem.optimal_value_Fstar is None:
        raise MissingReference(
            "instance has no optimal value F*; attach a reference value before running"
        )
    x = np.asarray(config.x0, dtype=float).copy()
    kernel.check_domain(x, "start point")

    master = np.random.SeedSequence(config.seed)
    idx_seq, eps_seq, xi_seq = master.spawn(3)
    idx_rng = np.random.default_rng(idx_seq)
    estimator = make_estimator(
        config.variant,
        problem,
        x,
        lsvrg_p=config.lsvrg_p,
        svrp_m=config.svrp_m,
        svrp_outer=config.svrp_outer,
        retain_points=config.retain_points or config.record_sigma,
        eps_rng=np.random.default_rng(eps_seq),
        xi_rng=np.random.default_rng(xi_seq),
    )
    inner_cfg = config.inner_config()
    K = config.iterations
    cadence = config.record_cadence
    xstar = problem.minimizer_xstar
    trace = Trace(config=config.to_dict())
    iterates = None
    if config.retain_iterates:
        iterates = np.empty((K + 1, problem.d))
        iterates[0] = x
    max_proxy = 0.0 if config.record_variance_proxy else None
    start = time.perf_counter()
    inner_since_record = 0

    def emit(k, alpha_last):
        gap = problem.objective_gap(x)
        rec = RunRecord(
            iteration=k,
            epoch=k / problem.n,
            objective_gap=gap,
            stepsize=alpha_last,
            inner_iterations=inner_since_record,
            wallclock_seconds=time.perf_counter() - start,
        )
        if xstar is not None:
            rec.bregman_dist_to_xstar = kernel.divergence(xstar, x)
        if config.record_sigma and config.variant != "none":
            rec.sigma_sq = estimator.sigma_sq(problem, kernel, xstar)
        trace.records.append(rec)
        return gap

    emit(0, config.stepsize(0))
    k = 0
    status = "completed"
    while k < K:
        chunk = min(cadence, K - k)
        indices = idx_rng.integers(problem.n, size=chunk)
        stop = None
        for j in range(chunk):
            i_k = int(indices[j])
            alpha = config.stepsize(k)
            e = estimator.compute_e(problem, i_k, x)
            try:
                if config.update_mode == "implicit":
                    x_next, inner = _solve_step(
                        config, kernel, problem, i_k, x, e, alpha, inner_cfg
                    )
                else:
                    v = problem.component_grad(i_k, x) - e
                    x_next = mirror_step(kernel, x, v, alpha)
                    inner = 0
                if max_proxy is not None:
                    v = problem.component_grad(i_k, x) - e
                    try:
                        z = mirror_step(kernel, x, v, alpha)
                        max_proxy = max(max_proxy, kernel.divergence(x, z) / alpha**2)
                    except StepOutOfDomain:
                        pass
            except StepOutOfDomain:
                stop = "domain_exit"
                break
            except InnerSolverDiverged:
                stop = "diverged"
                break
            inner_since_record += inner
            estimator.update(problem, i_k, x)
            x = x_next
            k += 1
            if iterates is not None:
                iterates[k] = x
        if stop is not None:
            status = stop
            emit(k, config.stepsize(max(k - 1, 0)))
            break
        gap = emit(k, config.stepsize(k - 1))
        inner_since_record = 0
        if not np.isfinite(gap) or gap > DIVERGENCE_GAP or not np.all(np.isfinite(x)):
            status = "diverged"
            break
    trace.status = status
    trace.final_x = x
    if iterates is not None:
        trace.iterates = iterates[: k + 1]
    trace.max_variance_proxy = max_proxy
    return trace


def averaged_iterate(trace, weights="uniform", constants=None):
    """Weighted average of the retained iterates x_0 .. x_{K-1}.

    "uniform" weights every iterate equally; "variance_adjusted" weights iterate t by
    (1/alpha_t)(1 - alpha_t (A + M C)) with (A, C) the variance constants of
    the run's variant and M the constants' auxiliary M0. All weights must be
    positive, which bounds the admissible stepsize.
    """
    if trace.iterates is None:
        raise InvalidConfig("averaging requires a run with retain_iterates=True")
    pts = trace.iterates[:-1]
    if pts.shape[0] == 0:
        raise InvalidConfig("averaging needs at least one iterate")
    if weights == "uniform":
        return pts.mean(axis=0)
    if weights != "variance_adjusted":
        raise InvalidConfig(f"unknown weighting rule {weights!r}")
    if constants is None:
        raise InvalidConfig("variance_adjusted weighting needs rate constants")
    from .theory import variance_constants

    config = RunConfig.from_dict(trace.config)
    A, _, C, _ = variance_constants(config.variant, constants)
    M = constants.M0
    w = np.empty(pts.shape[0])
    for t in range(pts.shape[0]):
        alpha = config.stepsize(t)
        w[t] = (1.0 / alpha) * (1.0 - alpha * (A + M * C))
    if np.any(w <= 0):
        raise InvalidConfig(
            "nonpositive averaging weight; the stepsize violates the cap 1/(A + M C)"
        )
    w /= w.sum()
    return w @ pts
