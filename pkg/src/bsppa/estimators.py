"""Variance-reduction estimators for the perturbation term e_k.

Each estimator produces a zero-mean (over the sampled index) dual vector
from its anchor state and is updated with the pre-update iterate x_k, which
is what the update rules prescribe. All anchors start at x_0.
"""

import numpy as np

from .errors import DomainViolation, InvalidConfig, MissingReference
from .kernels import get_kernel


class Estimator:
    variant = "abstract"
    _kernel = None

    def compute_e(self, problem, i_k, x_k):
        raise NotImplementedError

    def update(self, problem, i_k, x_k):
        raise NotImplementedError

    def _check_interior(self, x_k):
        if self._kernel is not None and not self._kernel.in_domain(x_k):
            raise DomainViolation("estimator update requires an interior iterate")

    def anchor_points(self):
        """Per-component anchor points, shape (n, d); None when not retained."""
        raise NotImplementedError

    def sigma_sq(self, problem, kernel, xstar):
        """Exact enumeration of the variance proxy at the current anchors:

            (2 L^2 / n) sum_i D_{h*}(grad h(a_i) - (grad f_i(a_i) - grad f_i(x*)) / L,
                                     grad h(a_i))

        with a_i the anchor of component i.
        """
        if xstar is None:
            raise MissingReference("sigma^2 diagnostic requires a known minimizer")
        anchors = self.anchor_points()
        if anchors is None:
            raise InvalidConfig(
                "sigma^2 diagnostic needs retained anchor points; "
                "construct the estimator with retain_points=True"
            )
        L = problem.rel_smoothness_L
        total = 0.0
        for i in range(problem.n):
            ai = anchors[i]
            u = kernel.mirror(ai)
            shift = (problem.component_grad(i, ai) - problem.component_grad(i, xstar)) / L
            arg = u - shift
            if not kernel.in_dual_domain(arg):
                raise DomainViolation(
                    "shifted dual point left int dom h* in the sigma^2 diagnostic"
                )
            total += kernel.dual_divergence(arg, u)
        return 2.0 * L * L * total / problem.n


class VanillaEstimator(Estimator):
    """e_k = 0: plain Bregman stochastic proximal point iterations."""

    variant = "none"

    def __init__(self, problem, x0):
        self._zero = np.zeros(problem.d)

    def compute_e(self, problem, i_k, x_k):
        return self._zero

    def update(self, problem, i_k, x_k):
        pass

    def anchor_points(self):
        return None

    def sigma_sq(self, problem, kernel, xstar):
        raise InvalidConfig("the vanilla variant has no variance-reduction state")


class SagaEstimator(Estimator):
    """SAGA-style gradient table.

    Stores grad f_i at the anchors (not the anchor points themselves, which
    is all the perturbation needs) plus the running table mean; row i_k is
    replaced by grad f_{i_k}(x_k) on update and the mean is maintained
    incrementally, with a periodic exact refresh.
    """

    variant = "saga"

    def __init__(self, problem, x0, retain_points=False):
        self.table = problem.grad_table(x0)
        self.mean = self.table.mean(axis=0)
        self.points = np.tile(np.asarray(x0, dtype=float), (problem.n, 1)) if retain_points else None
        self._updates_since_refresh = 0
        self._refresh_every = problem.n

    def compute_e(self, problem, i_k, x_k):
        return self.table[i_k] - self.mean

    def update(self, problem, i_k, x_k):
        self._check_interior(x_k)
        new_row = problem.component_grad(i_k, x_k)
        self.mean = self.mean + (new_row - self.table[i_k]) / problem.n
        self.table[i_k] = new_row
        if self.points is not None:
            self.points[i_k] = x_k
        self._updates_since_refresh += 1
        if self._updates_since_refresh >= self._refresh_every:
            self.mean = self.table.mean(axis=0)
            self._updates_since_refresh = 0

    def anchor_points(self):
        return self.points


class _AnchorEstimator(Estimator):
    """Shared machinery for the single-anchor variants."""

    def __init__(self, problem, x0):
        self.anchor = np.array(x0, dtype=float)
        self.anchor_grad = problem.full_grad(self.anchor)
        self._n = problem.n

    def compute_e(self, problem, i_k, x_k):
        return problem.component_grad(i_k, self.anchor) - self.anchor_grad

    def _move_anchor(self, problem, point):
        self.anchor = np.array(point, dtype=float)
        self.anchor_grad = problem.full_grad(self.anchor)

    def anchor_points(self):
        return np.broadcast_to(self.anchor, (self._n, self.anchor.size))


class LsvrgEstimator(_AnchorEstimator):
    """Loopless-SVRG anchor: refreshed to x_k with probability p each step."""

    variant = "lsvrg"

    def __init__(self, problem, x0, p, rng):
        if not 0 < p <= 1:
            raise InvalidConfig(f"anchor probability must be in (0, 1], got {p}")
        super().__init__(problem, x0)
        self.p = p
        self._rng = rng

    def update(self, problem, i_k, x_k):
        self._check_interior(x_k)
        if self._rng.random() < self.p:
            self._move_anchor(problem, x_k)


class SvrpEstimator(_AnchorEstimator):
    """Double-loop SVRG-style anchor with epoch length m.

    The anchor moves once per epoch, to either a uniformly chosen pre-update
    inner iterate or the average of the epoch's pre-update iterates. The
    iterate chain itself continues across epochs, which makes m = 1 with the
    random-index rule coincide with the loopless variant at p = 1.
    """

    variant = "svrp"

    def __init__(self, problem, x0, m, outer_mode, rng):
        if m < 1:
            raise InvalidConfig(f"epoch length must be at least 1, got {m}")
        if outer_mode not in ("random_index", "average"):
            raise InvalidConfig(f"unknown svrp outer rule {outer_mode!r}")
        super().__init__(problem, x0)
        self.m = m
        self.outer_mode = outer_mode
        self._rng = rng
        self._position = 0
        self._running_sum = np.zeros_like(self.anchor)
        self._pick = int(rng.integers(m))
        self._picked_point = None

    def update(self, problem, i_k, x_k):
        self._check_interior(x_k)
        if self._position == self._pick:
            self._picked_point = np.array(x_k, dtype=float)
        if self.outer_mode == "average":
            self._running_sum += x_k
        self._position += 1
        if self._position == self.m:
            if self.outer_mode == "average":
                self._move_anchor(problem, self._running_sum / self.m)
            else:
                self._move_anchor(problem, self._picked_point)
            self._position = 0
            self._running_sum[:] = 0.0
            self._pick = int(self._rng.integers(self.m))
            self._picked_point = None


def make_estimator(variant, problem, x0, *, lsvrg_p=None, svrp_m=None,
                   svrp_outer="random_index", retain_points=False,
                   eps_rng=None, xi_rng=None):
    """Build the estimator for a run, checking domain of the start point."""
    kernel = get_kernel(problem.kernel_name)
    kernel.check_domain(np.asarray(x0, dtype=float), "start point")
    if variant == "none":
        est = VanillaEstimator(problem, x0)
    elif variant == "saga":
        est = SagaEstimator(problem, x0, retain_points=retain_points)
    elif variant == "lsvrg":
        p = 1.0 / problem.n if lsvrg_p is None else lsvrg_p
        est = LsvrgEstimator(problem, x0, p, eps_rng)
    elif variant == "svrp":
        m = problem.n if svrp_m is None else svrp_m
        est = SvrpEstimator(problem, x0, m, svrp_outer, xi_rng)
    else:
        raise InvalidConfig(f"unknown variant {variant!r}")
    est._kernel = kernel
    return est
