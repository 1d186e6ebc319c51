"""Built-in acceptance runs on the standard problems."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List

from .central_path import OPTIMAL, PRIMAL_INFEASIBLE
from .errors import NsconicError
from .problems import exp_problem, infeasible_lp, power_problem, tiny_lp
from .solver import ADAPTIVE, HsdSolver, SolverConfig, solve
from .verifier import audit_trace, check_theoretical_constants, count_failures

logger = logging.getLogger(__name__)

THEORETICAL_ITERATIONS = 150


@dataclass
class SelftestCase:
    name: str
    passed: bool
    detail: str


def _optimal(problem_fn, expected: float, tol: float) -> Callable[[], str]:
    def run() -> str:
        result = solve(problem_fn(), SolverConfig(mode=ADAPTIVE, epsilon=1e-8))
        if result.status != OPTIMAL:
            raise AssertionError(f"status {result.status}")
        if not math.isclose(result.objective, expected, abs_tol=tol):
            raise AssertionError(f"objective {result.objective:.9g}, expected {expected}")
        return f"objective {result.objective:.9g} in {result.iterations} iterations"
    return run


def _infeasible() -> str:
    result = solve(infeasible_lp(), SolverConfig(mode=ADAPTIVE, epsilon=1e-8))
    if result.status != PRIMAL_INFEASIBLE:
        raise AssertionError(f"status {result.status}")
    by = result.classification.details["b_dot_y"]
    return f"certificate b'y = {by:.3g} in {result.iterations} iterations"


def _theoretical(problem_fn) -> Callable[[], str]:
    def run() -> str:
        solver = HsdSolver(problem_fn(), SolverConfig(verify=True, epsilon=1e-3))
        for _ in range(THEORETICAL_ITERATIONS):
            solver.step()
        records = solver.records
        verdicts = [v for rec in records for v in rec.verdicts]
        verdicts += check_theoretical_constants(records[1:], solver.nu, solver.params)
        verdicts += audit_trace(records, solver.nu, solver.params.beta, solver.params.eta)
        failures = count_failures(verdicts)
        if failures:
            first = next(v for v in verdicts if v.failed)
            raise AssertionError(f"{failures} verdict failures, first {first.check} at iter {first.iteration}")
        return f"{len(verdicts)} verdicts over {THEORETICAL_ITERATIONS} iterations"
    return run


CASES = [
    ("tiny_lp adaptive optimum", _optimal(tiny_lp, 1.0, 1e-6)),
    ("exp_problem adaptive optimum", _optimal(exp_problem, 0.0, 1e-5)),
    ("power_problem adaptive optimum", _optimal(power_problem, -1.0, 1e-5)),
    ("infeasible_lp certificate", _infeasible),
    ("tiny_lp theoretical audit", _theoretical(tiny_lp)),
    ("exp_problem theoretical audit", _theoretical(exp_problem)),
]


def run_selftest() -> List[SelftestCase]:
    out: List[SelftestCase] = []
    for name, fn in CASES:
        try:
            detail = fn()
            out.append(SelftestCase(name, True, detail))
        except (AssertionError, NsconicError) as e:
            logger.warning("selftest %s failed: %s", name, e)
            out.append(SelftestCase(name, False, str(e)))
    return out
