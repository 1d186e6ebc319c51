from __future__ import annotations

import numpy as np
import pytest

from nsconic.problems import exp_problem, power_problem, tiny_lp
from nsconic.solver import HsdSolver, SolverConfig

THEORETICAL_STEPS = 200


def _run(problem, steps: int) -> HsdSolver:
    solver = HsdSolver(problem, SolverConfig(verify=True, epsilon=1e-3))
    for _ in range(steps):
        solver.step()
    return solver


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def lp_theoretical() -> HsdSolver:
    """tiny_lp advanced THEORETICAL_STEPS iterations with inline verification."""
    return _run(tiny_lp(), THEORETICAL_STEPS)


@pytest.fixture(scope="session")
def exp_theoretical() -> HsdSolver:
    return _run(exp_problem(), THEORETICAL_STEPS)


@pytest.fixture(scope="session")
def power_theoretical() -> HsdSolver:
    """power_problem (a = 0.6) on the same schedule."""
    return _run(power_problem(), THEORETICAL_STEPS)
