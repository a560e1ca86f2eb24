"""Exception types shared across the package."""


class BsppaError(Exception):
    """Base class for all package-specific errors."""


class DomainViolation(BsppaError):
    """A point left the kernel domain (or its dual)."""


class StepOutOfDomain(BsppaError):
    """A mirror step produced a dual point outside int dom h*.

    Signals that the stepsize is too large for the attempted direction.
    """


class InvalidConfig(BsppaError):
    """A configuration value violates its contract."""


class MissingReference(BsppaError):
    """A reference quantity (F*, x*) is required but unknown."""


class ClosedFormInapplicable(BsppaError):
    """The separable closed-form prox does not apply; callers must fall
    back to the inexact solver or shrink the stepsize."""


class InnerSolverDiverged(BsppaError):
    """The inner solver did not reach its residual target."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SchemaMismatch(BsppaError):
    """A trace file carries an unexpected schema version."""
