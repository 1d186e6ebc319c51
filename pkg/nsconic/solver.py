"""Predictor-corrector iterations on the homogeneous self-dual embedding.

Each iteration takes a predictor step along aff + gamma * cen, scaled by W,
followed by a full corrector step that recenters the shadow iterates while
leaving G and mu_e unchanged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .central_path import (
    DUAL_INFEASIBLE,
    OPTIMAL,
    PRIMAL_INFEASIBLE,
    Classification,
    ConicProblem,
    HsdPoint,
    NeighborhoodReport,
    PathQuantities,
    check_assumptions,
    check_row_rank,
    classify_solution,
    initial_hsd_point,
    mu_e_of,
    path_quantities,
    residual,
)
from .cones import dual_membership_margin, membership_margin
from .errors import ConfigError, MaxIterationsExceeded, NsconicError, StepLeftCone
from .linalg import lu_factor
from .parameters import THEORETICAL_BETA, THEORETICAL_GAMMA, StepParameters, theoretical_alpha, theoretical_eta
from .scaling import ScalingMatrix, build_scaling, hessian_scaling
from .verifier import LemmaVerdict, audit_trace, check_theoretical_constants, count_failures, summarize, verify_iteration

logger = logging.getLogger(__name__)

THEORETICAL = "theoretical"
ADAPTIVE = "adaptive"
MODES = (THEORETICAL, ADAPTIVE)
SCALED = "scaled"
HESSIAN = "hessian"
CORRECTORS = (SCALED, HESSIAN)

REFINE_TOL = 1e-9
ADAPTIVE_SHRINK = 0.9
WARM_START_NOTCHES = 2


@dataclass(frozen=True)
class SolverConfig:
    mode: str = THEORETICAL
    epsilon: float = 1e-8
    max_iterations: Optional[int] = None
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    beta: float = THEORETICAL_BETA
    eta: Optional[float] = None
    adaptive_eta: float = 0.1
    verify: bool = False
    corrector: str = SCALED

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.corrector not in CORRECTORS:
            raise ConfigError(f"corrector must be one of {CORRECTORS}, got {self.corrector!r}")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if not 0.0 < self.beta <= 1.0:
            raise ConfigError(f"beta must lie in (0, 1], got {self.beta}")
        if self.eta is not None and not 0.0 <= self.eta < 1.0:
            raise ConfigError(f"eta must lie in [0, 1), got {self.eta}")
        if not 0.0 <= self.adaptive_eta < 1.0:
            raise ConfigError(f"adaptive_eta must lie in [0, 1), got {self.adaptive_eta}")
        if self.mode == THEORETICAL:
            if self.alpha is not None or self.gamma is not None:
                raise ConfigError("alpha and gamma are fixed in theoretical mode")
            if self.corrector == HESSIAN:
                raise ConfigError("the hessian corrector is only available in adaptive mode")
        if self.alpha is not None and not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.gamma is not None and not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")

    def parameters(self, nu: float) -> StepParameters:
        """The schedule for a cone of degree nu; in adaptive mode alpha is the search ceiling."""
        if self.mode == THEORETICAL:
            eta = theoretical_eta(nu) if self.eta is None else self.eta
            return StepParameters(theoretical_alpha(nu), self.beta, THEORETICAL_GAMMA, eta)
        return StepParameters(
            alpha=1.0 if self.alpha is None else self.alpha,
            beta=self.beta,
            gamma=THEORETICAL_GAMMA if self.gamma is None else self.gamma,
            eta=self.adaptive_eta if self.eta is None else self.eta,
        )

    def iteration_cap(self, nu: float) -> int:
        if self.max_iterations is not None:
            return int(self.max_iterations)
        return int(math.ceil(2000.0 * nu * math.log(1.0 / self.epsilon))) + 100


@dataclass(frozen=True)
class Direction:
    dy: np.ndarray
    dx: np.ndarray
    dtau: float
    ds: np.ndarray
    dkappa: float
    residual: float = 0.0

    def plus(self, other: "Direction", weight: float = 1.0) -> "Direction":
        return Direction(
            dy=self.dy + weight * other.dy,
            dx=self.dx + weight * other.dx,
            dtau=self.dtau + weight * other.dtau,
            ds=self.ds + weight * other.ds,
            dkappa=self.dkappa + weight * other.dkappa,
            residual=max(self.residual, other.residual),
        )

    def complementarity(self) -> float:
        """<dx, ds> + dtau dkappa."""
        return float(self.dx @ self.ds) + self.dtau * self.dkappa


@dataclass(frozen=True)
class RhsSpec:
    """Right-hand sides: G(dz) = g, the tau-kappa row = t, M dx + ds = r."""

    g: np.ndarray
    t: float
    r: np.ndarray


class KktSystem:
    """Newton system for a fixed iterate and scaling, reduced to (dy, dx, dtau).

        G(dy, dx, dtau, ds, dkappa) = g
        dkappa_coeff * dkappa + dtau_coeff * dtau = t
        M dx + ds = r

    ds and dkappa are eliminated and the remaining square system is factorized
    once, so several right-hand sides share one LU.
    """

    def __init__(self, problem: ConicProblem, M, dkappa_coeff: float, dtau_coeff: float) -> None:
        if not dkappa_coeff > 0.0:
            raise StepLeftCone(f"tau-kappa row coefficient {dkappa_coeff:.3e} must be positive")
        m, n = problem.m, problem.n
        M = np.asarray(M, dtype=float)
        A, b, c = problem.A, problem.b, problem.c
        K = np.zeros((m + n + 1, m + n + 1))
        K[:m, m:m + n] = A
        K[:m, -1] = -b
        K[m:m + n, :m] = -A.T
        K[m:m + n, m:m + n] = M
        K[m:m + n, -1] = c
        K[-1, :m] = b
        K[-1, m:m + n] = -c
        K[-1, -1] = dtau_coeff / dkappa_coeff
        self.problem = problem
        self.M = M
        self.dkappa_coeff = float(dkappa_coeff)
        self.dtau_coeff = float(dtau_coeff)
        self.matrix = K
        self.lu = lu_factor(K)

    @classmethod
    def scaled(cls, problem: ConicProblem, z: HsdPoint, W: ScalingMatrix) -> "KktSystem":
        return cls(problem, W.w, z.tau, z.kappa)

    def solve(self, rhs: RhsSpec) -> Direction:
        m, n = self.problem.m, self.problem.n
        g = np.asarray(rhs.g, dtype=float)
        r = np.asarray(rhs.r, dtype=float)
        full = np.concatenate([g[:m], g[m:m + n] + r, [g[-1] + rhs.t / self.dkappa_coeff]])
        sol = self.lu.solve(full)
        sol = sol + self.lu.solve(full - self.matrix @ sol)
        err = float(np.linalg.norm(full - self.matrix @ sol))
        if err > REFINE_TOL * (1.0 + float(np.linalg.norm(full))):
            logger.warning("KKT residual %.3e after refinement", err)
        dx = sol[m:m + n]
        dtau = float(sol[-1])
        return Direction(
            dy=sol[:m],
            dx=dx,
            dtau=dtau,
            ds=r - self.M @ dx,
            dkappa=(rhs.t - self.dtau_coeff * dtau) / self.dkappa_coeff,
            residual=err,
        )


def solve_directions(problem: ConicProblem, z: HsdPoint, W: ScalingMatrix, rhs: RhsSpec) -> Direction:
    return KktSystem.scaled(problem, z, W).solve(rhs)


def affine_rhs(problem: ConicProblem, z: HsdPoint) -> RhsSpec:
    return RhsSpec(g=-residual(problem, z), t=-z.tau * z.kappa, r=-z.s)


def centering_rhs(problem: ConicProblem, z: HsdPoint, pq: PathQuantities) -> RhsSpec:
    return RhsSpec(g=residual(problem, z), t=pq.mu_e, r=pq.mu_e * pq.s_tilde)


def _require_interior(problem: ConicProblem, z: HsdPoint, label: str) -> None:
    if not (z.tau > 0.0 and z.kappa > 0.0):
        raise StepLeftCone(f"{label}: tau = {z.tau:.3e}, kappa = {z.kappa:.3e}")
    if membership_margin(problem.cone, z.x) <= 0.0:
        raise StepLeftCone(f"{label}: x left the cone")
    if dual_membership_margin(problem.cone, z.s) <= 0.0:
        raise StepLeftCone(f"{label}: s left the dual cone")


def _is_interior(problem: ConicProblem, z: HsdPoint) -> bool:
    try:
        _require_interior(problem, z, "")
    except StepLeftCone:
        return False
    return True


@dataclass
class PredictorOutcome:
    z: HsdPoint
    z_plus: HsdPoint
    direction: Direction
    affine: Direction
    centering: Direction
    alpha: float
    gamma: float
    scaling: ScalingMatrix
    pq: PathQuantities

    @property
    def mu_e_plus(self) -> float:
        return mu_e_of(self.z_plus, self.pq.nu)


def predictor_directions(
    problem: ConicProblem, z: HsdPoint, pq: PathQuantities, W: ScalingMatrix, gamma: float
) -> Tuple[Direction, Direction, Direction]:
    """(aff + gamma * cen, aff, cen) from one factorization."""
    kkt = KktSystem.scaled(problem, z, W)
    aff = kkt.solve(affine_rhs(problem, z))
    cen = kkt.solve(centering_rhs(problem, z, pq))
    return aff.plus(cen, gamma), aff, cen


def predictor_step(
    problem: ConicProblem,
    z: HsdPoint,
    alpha: float,
    gamma: float,
    *,
    pq: Optional[PathQuantities] = None,
    scaling: Optional[ScalingMatrix] = None,
    directions: Optional[Tuple[Direction, Direction, Direction]] = None,
) -> PredictorOutcome:
    pq = pq if pq is not None else path_quantities(problem, z)
    W = scaling if scaling is not None else build_scaling(z.x, z.s, pq)
    pred, aff, cen = directions if directions is not None else predictor_directions(problem, z, pq, W, gamma)
    z_plus = z.advance(pred, alpha)
    _require_interior(problem, z_plus, "predictor")
    return PredictorOutcome(z, z_plus, pred, aff, cen, float(alpha), float(gamma), W, pq)


@dataclass
class CorrectorOutcome:
    z_plus: HsdPoint
    z_plus_plus: HsdPoint
    direction: Direction
    scaling: ScalingMatrix
    pq_plus: PathQuantities
    variant: str = SCALED


def corrector_step(
    problem: ConicProblem,
    z_plus: HsdPoint,
    *,
    variant: str = SCALED,
    pq_plus: Optional[PathQuantities] = None,
) -> CorrectorOutcome:
    """Full Newton step towards the shadow-centered point with the same mu_e."""
    pq_plus = pq_plus if pq_plus is not None else path_quantities(problem, z_plus)
    tau, kappa = z_plus.tau, z_plus.kappa
    if variant == SCALED:
        M = build_scaling(z_plus.x, z_plus.s, pq_plus)
        kkt = KktSystem(problem, M.w, tau, kappa)
        rhs = RhsSpec(np.zeros(problem.m + problem.n + 1), 0.0, pq_plus.mu * pq_plus.s_tilde - z_plus.s)
    elif variant == HESSIAN:
        M = hessian_scaling(pq_plus)
        mu_e = pq_plus.mu_e
        kkt = KktSystem(problem, M.w, tau * tau, mu_e)
        rhs = RhsSpec(
            np.zeros(problem.m + problem.n + 1),
            -kappa * tau * tau + mu_e * tau,
            mu_e * pq_plus.s_tilde - z_plus.s,
        )
    else:
        raise ConfigError(f"unknown corrector variant {variant!r}")
    d = kkt.solve(rhs)
    z_pp = z_plus.advance(d)
    _require_interior(problem, z_pp, "corrector")
    return CorrectorOutcome(z_plus, z_pp, d, M, pq_plus, variant)


@dataclass
class AdaptiveStep:
    alpha: float
    gamma: float
    fell_back: bool
    trials: int
    predictor: PredictorOutcome
    corrector: CorrectorOutcome
    pq_plus_plus: PathQuantities
    assumptions: NeighborhoodReport


def _advance_pair(problem, z, params, alpha, gamma, pq, W, directions, variant):
    pred = predictor_step(problem, z, alpha, gamma, pq=pq, scaling=W, directions=directions)
    pq_plus = path_quantities(problem, pred.z_plus)
    cor = corrector_step(problem, pred.z_plus, variant=variant, pq_plus=pq_plus)
    pq_pp = path_quantities(problem, cor.z_plus_plus)
    report = check_assumptions(problem, cor.z_plus_plus, params.beta, params.eta, pq=pq_pp)
    return pred, cor, pq_pp, report


def adaptive_step_search(
    problem: ConicProblem,
    z: HsdPoint,
    params: StepParameters,
    *,
    pq: Optional[PathQuantities] = None,
    scaling: Optional[ScalingMatrix] = None,
    alpha_start: Optional[float] = None,
    variant: str = SCALED,
) -> AdaptiveStep:
    """Largest alpha = 0.9^k * params.alpha whose predictor-corrector pair stays in the neighborhood.

    Candidates start at the first grid value not above alpha_start. Each is
    screened for interiority and positive tau, kappa at z+ before the
    corrector is tried. Below the theoretical step the default step is taken.
    """
    pq = pq if pq is not None else path_quantities(problem, z)
    W = scaling if scaling is not None else build_scaling(z.x, z.s, pq)
    gamma = params.gamma
    directions = predictor_directions(problem, z, pq, W, gamma)
    pred_dir = directions[0]
    floor = theoretical_alpha(problem.nu)
    alpha_max = params.alpha

    k = 0
    if alpha_start is not None and 0.0 < alpha_start < alpha_max:
        k = max(0, int(math.ceil(math.log(alpha_start / alpha_max) / math.log(ADAPTIVE_SHRINK) - 1e-12)))
    trials = 0
    alpha = alpha_max * ADAPTIVE_SHRINK ** k
    while alpha >= floor:
        trials += 1
        if _is_interior(problem, z.advance(pred_dir, alpha)):
            try:
                pred, cor, pq_pp, report = _advance_pair(problem, z, params, alpha, gamma, pq, W, directions, variant)
            except NsconicError as e:
                logger.debug("alpha = %.4g rejected: %s", alpha, e)
            else:
                if report.all_hold:
                    return AdaptiveStep(alpha, gamma, False, trials, pred, cor, pq_pp, report)
        k += 1
        alpha = alpha_max * ADAPTIVE_SHRINK ** k

    logger.warning("no step size accepted after %d trials; taking alpha = %.4g", trials, floor)
    pred, cor, pq_pp, report = _advance_pair(problem, z, params, floor, gamma, pq, W, directions, variant)
    return AdaptiveStep(floor, gamma, True, trials, pred, cor, pq_pp, report)


@dataclass
class IterationRecord:
    iteration: int
    mu_e: float
    res_norm: float
    tau: float
    kappa: float
    delta_p_norm_x: float
    alpha: float
    gamma: float
    assumptions: NeighborhoodReport
    verdict_failures: int = 0
    verdicts: List[LemmaVerdict] = field(default_factory=list)
    measurements: Dict[str, float] = field(default_factory=dict)
    fallback: bool = False


@dataclass
class SolveResult:
    problem: ConicProblem
    status: str
    point: HsdPoint
    classification: Classification
    iterations: int
    target_reached: bool
    mode: str
    parameters: StepParameters
    initial_res_norm: float
    trace: List[IterationRecord]
    constant_verdicts: List[LemmaVerdict] = field(default_factory=list)
    trace_verdicts: List[LemmaVerdict] = field(default_factory=list)

    @property
    def nu(self) -> float:
        return self.problem.nu

    @property
    def mu_e(self) -> float:
        return self.trace[-1].mu_e

    @property
    def res_norm(self) -> float:
        return self.trace[-1].res_norm

    @property
    def x(self) -> Optional[np.ndarray]:
        return self.classification.x

    @property
    def y(self) -> Optional[np.ndarray]:
        return self.classification.y

    @property
    def s(self) -> Optional[np.ndarray]:
        return self.classification.s

    @property
    def objective(self) -> Optional[float]:
        if self.status != OPTIMAL:
            return None
        return float(self.problem.c @ self.classification.x)

    @property
    def verdicts(self) -> List[LemmaVerdict]:
        out: List[LemmaVerdict] = []
        for rec in self.trace:
            out.extend(rec.verdicts)
        return out + self.constant_verdicts + self.trace_verdicts

    @property
    def verdict_failures(self) -> int:
        return count_failures(self.verdicts)

    def verdict_summary(self) -> Dict[str, Dict[str, int]]:
        return summarize(self.verdicts)

    def exit_code(self) -> int:
        if self.verdict_failures:
            return 3
        if self.status in (OPTIMAL, PRIMAL_INFEASIBLE, DUAL_INFEASIBLE):
            return 0
        if self.mode == THEORETICAL and self.target_reached:
            return 0
        return 2


class HsdSolver:
    """Iterates from the canonical starting point; `step` advances one predictor-corrector pair."""

    def __init__(self, problem: ConicProblem, config: Optional[SolverConfig] = None) -> None:
        self.problem = problem
        self.config = config or SolverConfig()
        self.nu = problem.nu
        self.params = self.config.parameters(self.nu)
        check_row_rank(problem)
        self.z = initial_hsd_point(problem)
        self.pq = path_quantities(problem, self.z)
        self.initial_res_norm = float(np.linalg.norm(residual(problem, self.z)))
        self._last_alpha: Optional[float] = None
        report = check_assumptions(problem, self.z, self.params.beta, self.params.eta, pq=self.pq)
        self.records: List[IterationRecord] = [self._record(0, self.z, self.pq, 0.0, 0.0, report)]
        logger.info(
            "starting %s run on %s: n=%d m=%d nu=%g", self.config.mode, problem.name or "problem", problem.n, problem.m, self.nu
        )

    @property
    def iteration(self) -> int:
        return len(self.records) - 1

    def _record(self, k, z, pq, alpha, gamma, report, **extra) -> IterationRecord:
        return IterationRecord(
            iteration=k,
            mu_e=mu_e_of(z, self.nu),
            res_norm=float(np.linalg.norm(residual(self.problem, z))),
            tau=z.tau,
            kappa=z.kappa,
            delta_p_norm_x=pq.delta_p_norm_x,
            alpha=alpha,
            gamma=gamma,
            assumptions=report,
            **extra,
        )

    def target_reached(self) -> bool:
        rec = self.records[-1]
        eps = self.config.epsilon
        return rec.mu_e <= eps and rec.res_norm <= eps * self.initial_res_norm

    def classify(self) -> Classification:
        return classify_solution(self.problem, self.z)

    def finished(self) -> bool:
        if self.target_reached():
            return True
        if self.config.mode == ADAPTIVE:
            return self.classify().status in (PRIMAL_INFEASIBLE, DUAL_INFEASIBLE)
        return False

    def step(self) -> IterationRecord:
        problem, z, pq, params = self.problem, self.z, self.pq, self.params
        W = build_scaling(z.x, z.s, pq)
        fallback = False
        if self.config.mode == ADAPTIVE:
            start = None
            if self._last_alpha is not None:
                start = self._last_alpha / ADAPTIVE_SHRINK ** WARM_START_NOTCHES
            found = adaptive_step_search(
                problem, z, params, pq=pq, scaling=W, alpha_start=start, variant=self.config.corrector
            )
            pred, cor, pq_pp, report = found.predictor, found.corrector, found.pq_plus_plus, found.assumptions
            fallback = found.fell_back
        else:
            pred, cor, pq_pp, report = _advance_pair(
                problem, z, params, params.alpha, params.gamma, pq, W, None, self.config.corrector
            )
        self._last_alpha = pred.alpha

        verdicts: List[LemmaVerdict] = []
        measurements: Dict[str, float] = {}
        k = self.iteration + 1
        if self.config.verify:
            verdicts, measurements = verify_iteration(
                problem, pred, cor, params, self.records[-1].assumptions, report, iteration=k
            )
        rec = self._record(
            k,
            cor.z_plus_plus,
            pq_pp,
            pred.alpha,
            pred.gamma,
            report,
            verdict_failures=count_failures(verdicts),
            verdicts=verdicts,
            measurements=measurements,
            fallback=fallback,
        )
        if not report.all_hold:
            logger.warning("iteration %d left the neighborhood: %s", k, report.flags())
        logger.debug(
            "iter %d mu_e=%.6e res=%.6e tau=%.4g kappa=%.4g delta=%.3e alpha=%.4g",
            k, rec.mu_e, rec.res_norm, rec.tau, rec.kappa, rec.delta_p_norm_x, rec.alpha,
        )
        self.records.append(rec)
        self.z, self.pq = cor.z_plus_plus, pq_pp
        return rec

    def result(self) -> SolveResult:
        classification = self.classify()
        status = classification.status
        constants: List[LemmaVerdict] = []
        audit: List[LemmaVerdict] = []
        if self.config.verify:
            if self.config.mode == THEORETICAL:
                constants = check_theoretical_constants(self.records[1:], self.nu, self.params)
            audit = audit_trace(self.records, self.nu, self.params.beta, self.params.eta)
        return SolveResult(
            problem=self.problem,
            status=status,
            point=self.z,
            classification=classification,
            iterations=self.iteration,
            target_reached=self.target_reached(),
            mode=self.config.mode,
            parameters=self.params,
            initial_res_norm=self.initial_res_norm,
            trace=list(self.records),
            constant_verdicts=constants,
            trace_verdicts=audit,
        )

    def run(self) -> SolveResult:
        cap = self.config.iteration_cap(self.nu)
        while not self.finished():
            if self.iteration >= cap:
                result = self.result()
                logger.warning("stopped after %d iterations, mu_e = %.3e", cap, result.mu_e)
                raise MaxIterationsExceeded(f"no decision after {cap} iterations", result=result)
            self.step()
        result = self.result()
        logger.info("finished after %d iterations: %s, mu_e = %.3e", result.iterations, result.status, result.mu_e)
        return result


def solve(problem: ConicProblem, config: Optional[SolverConfig] = None) -> SolveResult:
    return HsdSolver(problem, config).run()
