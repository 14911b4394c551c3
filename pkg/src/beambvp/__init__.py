"""Positive solutions of u'''' + f(u) = 0 with an integral boundary condition.

The boundary value problem

    u''''(t) + f(u(t)) = 0,  t in (0, 1),
    u'(0) = u'(1) = u''(0) = 0,  u(0) = integral_0^1 a(s) u(s) ds,

is recast as a fixed-point equation for an integral operator with an
explicit kernel, discretized by collocation at quadrature nodes, and
solved by damped Picard or Newton iteration. An independent
finite-difference path and a set of kernel-bound property checks guard
the implementation.
"""

from .analysis import (
    Certificate,
    GrowthEstimate,
    Problem,
    ValidationReport,
    certificate,
    estimate_f0,
    estimate_finf,
    make_problem,
    validate_hypotheses,
)
from .config import RunConfig
from .errors import (
    BeamBVPError,
    DomainError,
    HypothesisViolation,
    InvalidConfig,
    InvalidRange,
    NegativeWeight,
    OutOfDomain,
    ParseError,
    SingularJacobian,
    SingularSystem,
)
from .expressions import Expression, evaluate, parse
from .kernel import (
    ConeConstants,
    cone_constants,
    green,
    kernel_eval,
    kernel_weight,
    lower_envelope,
    rho,
    strip_lower_bound,
    upper_envelope,
)
from .oracle import fd_solve_linear, fd_solve_nonlinear, formula_solve_linear
from .quadrature import (
    Quadrature,
    default_quadrature,
    integrate,
    integrate_on,
    make_quadrature,
)
from .solver import (
    DiscreteFunction,
    NystromOperator,
    ResidualReport,
    SolveReport,
    apply,
    build_operator,
    interpolate,
    newton,
    picard,
    residuals,
    solve_auto,
)
from .verify import run_checks

__version__ = "0.1.0"

__all__ = [
    "BeamBVPError", "Certificate", "ConeConstants", "DiscreteFunction",
    "DomainError", "Expression", "GrowthEstimate", "HypothesisViolation",
    "InvalidConfig", "InvalidRange", "NegativeWeight", "NystromOperator",
    "OutOfDomain", "ParseError", "Problem", "Quadrature", "ResidualReport",
    "RunConfig", "SingularJacobian", "SingularSystem", "SolveReport",
    "ValidationReport", "apply", "build_operator", "certificate",
    "cone_constants", "default_quadrature", "estimate_f0", "estimate_finf", "evaluate",
    "fd_solve_linear", "fd_solve_nonlinear", "formula_solve_linear", "green",
    "integrate", "integrate_on", "interpolate", "kernel_eval",
    "kernel_weight", "lower_envelope", "make_problem", "make_quadrature",
    "newton", "parse", "picard", "residuals", "rho", "run_checks",
    "solve_auto", "strip_lower_bound", "upper_envelope",
    "validate_hypotheses",
]
