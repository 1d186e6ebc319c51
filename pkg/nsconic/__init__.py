"""Predictor-corrector interior-point solver for nonsymmetric conic programs."""

from .central_path import ConicProblem, HsdPoint, check_assumptions, classify_solution, path_quantities, residual
from .cones import ExponentialCone, NonnegOrthant, PowerCone, ProductCone, barrier_eval, conjugate_shadow, initial_point
from .errors import NsconicError
from .formats import parse_problem, read_trace, serialize_problem, write_problem, write_trace
from .problems import exp_problem, infeasible_lp, power_problem, tiny_lp
from .scaling import build_scaling, sandwich_bounds, verify_sandwich
from .solver import HsdSolver, SolveResult, SolverConfig, solve
from .verifier import LemmaVerdict, audit_trace, check_theoretical_constants

__all__ = [
    "ConicProblem",
    "HsdPoint",
    "check_assumptions",
    "classify_solution",
    "path_quantities",
    "residual",
    "ExponentialCone",
    "NonnegOrthant",
    "PowerCone",
    "ProductCone",
    "barrier_eval",
    "conjugate_shadow",
    "initial_point",
    "NsconicError",
    "parse_problem",
    "read_trace",
    "serialize_problem",
    "write_problem",
    "write_trace",
    "exp_problem",
    "infeasible_lp",
    "power_problem",
    "tiny_lp",
    "build_scaling",
    "sandwich_bounds",
    "verify_sandwich",
    "HsdSolver",
    "SolveResult",
    "SolverConfig",
    "solve",
    "LemmaVerdict",
    "audit_trace",
    "check_theoretical_constants",
]
