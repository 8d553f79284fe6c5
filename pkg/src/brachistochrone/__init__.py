"""Numerical toolkit for the brachistochrone as a problem in the calculus of variations."""

from .curves import Mesh, SampledCurve, circle_curve, line_curve, load_curve_csv, make_mesh, save_curve_csv
from .cycloid_solver import (
    BrachProblem,
    BrachSolution,
    Shape,
    alpha,
    alpha_prime,
    exact_travel_time,
    invert_alpha,
    same_cycloid_partner,
    sample_solution,
    solve,
)
from .direct_minimizer import MinimizeConfig, MinimizeOutcome, TransformedCurve, minimize_direct, transform
from .errors import (
    ArgumentError,
    BrachistochroneError,
    CurveFormatError,
    DomainError,
    InvariantViolation,
    QuadratureError,
)
from .lagrangians import Hessian2, Rectangle, brachistochrone_lagrangian, convexity_report, hessian, transformed_lagrangian
from .quadrature import QuadratureConfig
from .variational import (
    beltrami_residual,
    directional_derivative,
    el_residual,
    finite_difference_derivative,
    make_admissible_perturbation,
    travel_time,
    weak_form_residual,
)

__version__ = "0.1.0"
