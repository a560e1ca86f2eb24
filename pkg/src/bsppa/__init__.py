"""Bregman stochastic proximal point solvers with pluggable variance
reduction, a Poisson inverse-problem benchmark harness, and an executable
property suite for the underlying identities."""

from .backend import backend_name
from .errors import (
    BsppaError,
    ClosedFormInapplicable,
    DomainViolation,
    InnerSolverDiverged,
    InvalidConfig,
    MissingReference,
    SchemaMismatch,
    StepOutOfDomain,
)
from .kernels import bregman, get_kernel, inverse_mirror_map, mirror_map
from .problems import (
    FiniteSumProblem,
    PoissonProblem,
    QuadraticProblem,
    load_instance,
    make_poisson_instance,
    make_quadratic_instance,
)
from .prox import (
    InnerSolverConfig,
    ProxResult,
    mirror_step,
    solve_prox_inexact,
    solve_prox_separable,
)
from .reference import attach_reference_fstar, reference_minimize
from .runner import RunConfig, RunRecord, Trace, averaged_iterate, run_unified
from .theory import (
    RateConstants,
    contraction_factor,
    gain_bound,
    recommended_stepsize,
    sigma_sq_diagnostic,
    stepsize_cap,
)

__version__ = "0.1.0"
