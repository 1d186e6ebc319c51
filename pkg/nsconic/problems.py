from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from .central_path import ConicProblem
from .cones import ExponentialCone, NonnegOrthant, PowerCone


def tiny_lp() -> ConicProblem:
    """min x1 + 2 x2 s.t. x1 + x2 = 1, x >= 0; optimum 1 at (1, 0)."""
    return ConicProblem(np.array([[1.0, 1.0]]), np.array([1.0]), np.array([1.0, 2.0]), NonnegOrthant(2), name="tiny_lp")


def exp_problem() -> ConicProblem:
    """max x3 s.t. x1 = 1, x2 = 1, x in K_exp; optimum 0 (x3 = log(x1/x2))."""
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return ConicProblem(A, np.array([1.0, 1.0]), np.array([0.0, 0.0, -1.0]), ExponentialCone(), name="exp_problem")


def power_problem(alpha: float = 0.6) -> ConicProblem:
    """max x3 s.t. x1 = 1, x2 = 1, x in K_pow(alpha); optimum -1."""
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    return ConicProblem(A, np.array([1.0, 1.0]), np.array([0.0, 0.0, -1.0]), PowerCone(alpha), name="power_problem")


def infeasible_lp() -> ConicProblem:
    """x1 = -1, x1 >= 0."""
    return ConicProblem(np.array([[1.0]]), np.array([-1.0]), np.array([1.0]), NonnegOrthant(1), name="infeasible_lp")


STANDARD_PROBLEMS: Dict[str, Callable[[], ConicProblem]] = {
    "tiny_lp": tiny_lp,
    "exp_problem": exp_problem,
    "power_problem": power_problem,
    "infeasible_lp": infeasible_lp,
}
