"""Bregman kernels: squared Euclidean and Burg entropy.

A kernel bundles the generating function h, its mirror map grad(h), the
inverse map grad(h*), and closed-form primal/dual divergences. Kernels are
stateless value objects and safe to share between concurrent runs.
"""

import numpy as np

from .errors import DomainViolation, InvalidConfig

# Interior tolerance for the positive orthant: coordinates below this raise
# DomainViolation instead of being clamped, so a diverging dual iterate is
# reported rather than masked.
POSITIVE_DOMAIN_EPS = 1e-12


def _is_ratio_divergence_sum(num, den):
    # sum of r - log r - 1 over r = num/den, written as t - log1p(t) with
    # t = (num - den)/den to stay accurate for r near 1
    t = (num - den) / den
    return float(np.sum(t - np.log1p(t)))


class Kernel:
    """Interface shared by all kernels."""

    name = "abstract"
    domain_kind = "abstract"

    def value(self, x):
        raise NotImplementedError

    def dual_value(self, y):
        raise NotImplementedError

    def mirror(self, x):
        """grad(h): primal point -> dual vector."""
        raise NotImplementedError

    def inverse_mirror(self, y):
        """grad(h*): dual vector -> interior primal point."""
        raise NotImplementedError

    def divergence(self, x, y):
        """D_h(x, y) in closed form."""
        raise NotImplementedError

    def dual_divergence(self, y1, y2):
        """D_{h*}(y1, y2) in closed form."""
        raise NotImplementedError

    def in_domain(self, x):
        raise NotImplementedError

    def in_dual_domain(self, y):
        raise NotImplementedError

    def check_domain(self, x, what="point"):
        if not self.in_domain(x):
            raise DomainViolation(
                f"{what} outside the {self.name} kernel domain "
                f"(min coordinate {np.min(x):.3e})"
            )

    def check_dual_domain(self, y, what="dual point"):
        if not self.in_dual_domain(y):
            raise DomainViolation(
                f"{what} outside int dom h* for the {self.name} kernel "
                f"(max coordinate {np.max(y):.3e})"
            )

    def __repr__(self):
        return f"<Kernel {self.name}>"


class EuclideanKernel(Kernel):
    """h(x) = ||x||^2 / 2 on all of R^d; the mirror map is the identity."""

    name = "euclidean"
    domain_kind = "full-space"

    def value(self, x):
        return 0.5 * float(np.dot(x, x))

    def dual_value(self, y):
        return 0.5 * float(np.dot(y, y))

    def mirror(self, x):
        return np.asarray(x, dtype=float)

    def inverse_mirror(self, y):
        return np.asarray(y, dtype=float)

    def divergence(self, x, y):
        d = np.asarray(x, dtype=float) - y
        return 0.5 * float(np.dot(d, d))

    def dual_divergence(self, y1, y2):
        d = np.asarray(y1, dtype=float) - y2
        return 0.5 * float(np.dot(d, d))

    def in_domain(self, x):
        return bool(np.all(np.isfinite(x)))

    def in_dual_domain(self, y):
        return bool(np.all(np.isfinite(y)))


class BurgKernel(Kernel):
    """h(x) = -sum_j log x_j on the strictly positive orthant.

    The primal divergence is the Itakura-Saito divergence
    sum_j (x_j/y_j - log(x_j/y_j) - 1); the dual divergence has the same
    form on strictly negative vectors. The mirror map sends strictly
    positive vectors to strictly negative ones and vice versa.
    """

    name = "burg"
    domain_kind = "strictly-positive-orthant"

    def value(self, x):
        self.check_domain(x)
        return -float(np.sum(np.log(x)))

    def dual_value(self, y):
        self.check_dual_domain(y)
        y = np.asarray(y, dtype=float)
        return -y.size - float(np.sum(np.log(-y)))

    def mirror(self, x):
        self.check_domain(x)
        return -1.0 / np.asarray(x, dtype=float)

    def inverse_mirror(self, y):
        self.check_dual_domain(y)
        return -1.0 / np.asarray(y, dtype=float)

    def divergence(self, x, y):
        self.check_domain(x, "first argument")
        self.check_domain(y, "second argument")
        return _is_ratio_divergence_sum(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def dual_divergence(self, y1, y2):
        self.check_dual_domain(y1, "first dual argument")
        self.check_dual_domain(y2, "second dual argument")
        return _is_ratio_divergence_sum(np.asarray(y1, dtype=float), np.asarray(y2, dtype=float))

    def in_domain(self, x):
        x = np.asarray(x)
        return bool(np.all(np.isfinite(x)) and np.all(x >= POSITIVE_DOMAIN_EPS))

    def in_dual_domain(self, y):
        y = np.asarray(y)
        return bool(np.all(np.isfinite(y)) and np.all(y < 0.0))


_KERNELS = {
    "euclidean": EuclideanKernel(),
    "burg": BurgKernel(),
}


def get_kernel(name):
    """Look a kernel up by its config identifier ("euclidean" | "burg")."""
    try:
        return _KERNELS[name]
    except KeyError:
        raise InvalidConfig(
            f"unknown kernel {name!r}; available: {sorted(_KERNELS)}"
        ) from None


def mirror_map(kernel, x):
    """grad(h)(x) for x strictly inside the kernel domain."""
    return kernel.mirror(x)


def inverse_mirror_map(kernel, y):
    """grad(h*)(y); inverts mirror_map on the interior."""
    return kernel.inverse_mirror(y)


def bregman(kernel, x, y):
    """D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>, via the closed form."""
    return kernel.divergence(x, y)


def bregman_definitional(kernel, x, y):
    """Three-term definition of D_h; retained as a test oracle only."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return kernel.value(x) - kernel.value(y) - float(np.dot(kernel.mirror(y), x - y))
