from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .cones import BarrierEval, Cone, ShadowPair, barrier_eval, conjugate_shadow, dual_membership_margin, initial_point, membership_margin
from .errors import DimensionMismatch, NotInterior, NsconicError
from .linalg import norm_induced

logger = logging.getLogger(__name__)

OPTIMAL = "Optimal"
PRIMAL_INFEASIBLE = "PrimalInfeasible"
DUAL_INFEASIBLE = "DualInfeasible"
UNKNOWN = "Unknown"

RATIO_THRESHOLD = 1e3
RATIO_GUARD = 1e-14


@dataclass(frozen=True)
class ConicProblem:
    """min <c, x> s.t. Ax = b, x in K, with its dual max <b, y> s.t. c - A^T y in K*."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cone: Cone
    name: str = ""

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        m, n = A.shape
        if b.shape[0] != m:
            raise DimensionMismatch(f"b has length {b.shape[0]}, A has {m} rows")
        if c.shape[0] != n:
            raise DimensionMismatch(f"c has length {c.shape[0]}, A has {n} columns")
        if self.cone.dim != n:
            raise DimensionMismatch(f"cone dimension {self.cone.dim} does not match n = {n}")
        for label, arr in (("A", A), ("b", b), ("c", c)):
            if not np.all(np.isfinite(arr)):
                raise DimensionMismatch(f"{label} has non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return int(self.A.shape[0])

    @property
    def n(self) -> int:
        return int(self.A.shape[1])

    @property
    def nu(self) -> float:
        return self.cone.nu


def row_rank(A: np.ndarray) -> int:
    """Numerical rank from a column-pivoted QR."""
    if A.size == 0:
        return 0
    R = sla.qr(A, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    tol = max(A.shape) * np.finfo(float).eps * diag[0]
    return int(np.sum(diag > tol))


def check_row_rank(problem: ConicProblem) -> bool:
    rank = row_rank(problem.A)
    if rank < problem.m:
        logger.warning("A has rank %d < m = %d; the KKT solve may report singularity", rank, problem.m)
        return False
    return True


@dataclass(frozen=True)
class HsdPoint:
    y: np.ndarray
    x: np.ndarray
    tau: float
    s: np.ndarray
    kappa: float

    def advance(self, d, step: float = 1.0) -> "HsdPoint":
        """z + step * d for a direction with dy, dx, dtau, ds, dkappa."""
        return HsdPoint(
            y=self.y + step * d.dy,
            x=self.x + step * d.dx,
            tau=float(self.tau + step * d.dtau),
            s=self.s + step * d.ds,
            kappa=float(self.kappa + step * d.dkappa),
        )

    def scaled(self, t: float) -> "HsdPoint":
        return HsdPoint(self.y * t, self.x * t, self.tau * t, self.s * t, self.kappa * t)


def initial_hsd_point(problem: ConicProblem) -> HsdPoint:
    x0 = initial_point(problem.cone)
    return HsdPoint(y=np.zeros(problem.m), x=x0.copy(), tau=1.0, s=x0.copy(), kappa=1.0)


def hsd_residual(problem: ConicProblem, y, x, tau: float, s, kappa: float) -> np.ndarray:
    A, b, c = problem.A, problem.b, problem.c
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if y.shape != (problem.m,) or x.shape != (problem.n,) or s.shape != (problem.n,):
        raise DimensionMismatch(
            f"point shapes y{y.shape} x{x.shape} s{s.shape} do not match m={problem.m}, n={problem.n}"
        )
    return np.concatenate([
        A @ x - b * tau,
        -A.T @ y + c * tau - s,
        [float(b @ y - c @ x - kappa)],
    ])


def residual(problem: ConicProblem, z: HsdPoint) -> np.ndarray:
    """G(y, x, tau, s, kappa) = [Ax - b tau; -A^T y + c tau - s; b^T y - c^T x - kappa]."""
    return hsd_residual(problem, z.y, z.x, z.tau, z.s, z.kappa)


def skew_form(problem: ConicProblem, y, x, tau: float) -> float:
    """<(y, x, tau), M (y, x, tau)> for the skew-symmetric part of G; zero for every input."""
    g = hsd_residual(problem, y, x, tau, np.zeros(problem.n), 0.0)
    return float(np.concatenate([y, x, [tau]]) @ g)


def mu_e_of(z: HsdPoint, nu: float) -> float:
    return (float(z.x @ z.s) + z.tau * z.kappa) / (nu + 1.0)


@dataclass(frozen=True)
class PathQuantities:
    mu: float
    mu_tilde: float
    mu_e: float
    mu_tilde_e: float
    delta_p: np.ndarray
    delta_d: np.ndarray
    delta_p_norm_x: float
    nu: float
    barrier: BarrierEval
    shadow: ShadowPair
    shadow_barrier: BarrierEval

    @property
    def x_tilde(self) -> np.ndarray:
        return self.shadow.x_tilde

    @property
    def s_tilde(self) -> np.ndarray:
        return self.shadow.s_tilde

    @property
    def dual_hessian_inverse(self) -> np.ndarray:
        """F*''(s)^{-1}, which equals F''(x_tilde)."""
        return self.shadow_barrier.hessian


def cone_quantities(cone: Cone, x, s, *, tau_kappa: float = 1.0, hint=None) -> PathQuantities:
    be = barrier_eval(cone, x)
    if hint is None:
        mu_guess = float(x @ s) / cone.nu
        hint = x / mu_guess if mu_guess > 0 else None
    x_tilde = conjugate_shadow(cone, s, hint)
    shadow_be = barrier_eval(cone, x_tilde)
    s_tilde = -be.gradient
    nu = cone.nu
    mu = float(x @ s) / nu
    mu_tilde = float(x_tilde @ s_tilde) / nu
    delta_p = x - mu * x_tilde
    delta_d = s - mu * s_tilde
    return PathQuantities(
        mu=mu,
        mu_tilde=mu_tilde,
        mu_e=(mu * nu + tau_kappa) / (nu + 1.0),
        mu_tilde_e=(mu_tilde * nu + 1.0 / tau_kappa) / (nu + 1.0) if tau_kappa != 0.0 else math.inf,
        delta_p=delta_p,
        delta_d=delta_d,
        delta_p_norm_x=norm_induced(delta_p, be.hessian),
        nu=nu,
        barrier=be,
        shadow=ShadowPair(x_tilde=x_tilde, s_tilde=s_tilde, mu=mu, mu_tilde=mu_tilde),
        shadow_barrier=shadow_be,
    )


def path_quantities(problem: ConicProblem, z: HsdPoint, hint=None) -> PathQuantities:
    tk = z.tau * z.kappa
    if not (z.tau > 0.0 and z.kappa > 0.0):
        raise NotInterior(f"tau = {z.tau:.3e}, kappa = {z.kappa:.3e} must both be positive")
    return cone_quantities(problem.cone, z.x, z.s, tau_kappa=tk, hint=hint)


@dataclass(frozen=True)
class NeighborhoodReport:
    a1: bool
    a2: bool
    a3: bool
    a4: bool
    a5: bool
    primal_margin: float = math.nan
    dual_margin: float = math.nan
    tau_kappa_slack: float = math.nan
    shadow_slack: float = math.nan
    distance_slack: float = math.nan
    tau: float = math.nan
    kappa: float = math.nan
    beta: float = math.nan
    eta: float = math.nan

    @property
    def all_hold(self) -> bool:
        return self.a1 and self.a2 and self.a3 and self.a4 and self.a5

    def flags(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a5)

    @classmethod
    def from_flags(cls, flags, beta: float = math.nan, eta: float = math.nan) -> "NeighborhoodReport":
        a1, a2, a3, a4, a5 = (bool(f) for f in flags)
        return cls(a1, a2, a3, a4, a5, beta=beta, eta=eta)


def check_assumptions(
    problem: ConicProblem,
    z: HsdPoint,
    beta: float,
    eta: float,
    pq: Optional[PathQuantities] = None,
) -> NeighborhoodReport:
    """Evaluate the five neighborhood conditions; reports, never raises.

    a1: x in int K, s in int K*; a2: beta mu_e <= tau kappa; a3: tau, kappa > 0;
    a4: beta mu_e mu_tilde <= 1; a5: ||x - mu x_tilde||_x <= eta.
    """
    cone = problem.cone
    primal = membership_margin(cone, z.x)
    dual = dual_membership_margin(cone, z.s)
    mu_e = mu_e_of(z, cone.nu)
    tk_slack = z.tau * z.kappa - beta * mu_e
    shadow_slack = math.nan
    distance_slack = math.nan
    if primal > 0.0 and dual > 0.0:
        try:
            if pq is None:
                pq = cone_quantities(cone, z.x, z.s, tau_kappa=z.tau * z.kappa)
            shadow_slack = 1.0 - beta * mu_e * pq.mu_tilde
            distance_slack = eta - pq.delta_p_norm_x
        except (NsconicError, np.linalg.LinAlgError, FloatingPointError) as e:  # numeric failure marks a4/a5 false
            logger.warning("neighborhood check could not evaluate shadow quantities: %s", e)
    return NeighborhoodReport(
        a1=primal > 0.0 and dual > 0.0,
        a2=tk_slack >= 0.0,
        a3=z.tau > 0.0 and z.kappa > 0.0,
        a4=shadow_slack >= 0.0,
        a5=distance_slack >= 0.0,
        primal_margin=primal,
        dual_margin=dual,
        tau_kappa_slack=tk_slack,
        shadow_slack=shadow_slack,
        distance_slack=distance_slack,
        tau=z.tau,
        kappa=z.kappa,
        beta=beta,
        eta=eta,
    )


@dataclass
class Classification:
    status: str
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    details: dict = field(default_factory=dict)


def classify_solution(
    problem: ConicProblem,
    z: HsdPoint,
    ratio: float = RATIO_THRESHOLD,
    guard: float = RATIO_GUARD,
) -> Classification:
    """Read a status off tau/kappa dominance.

    Optimal returns (x, y, s) / tau. Infeasibility returns normalized rays:
    (y, s) / <b, y> for the primal, x / -<c, x> for the dual.
    """
    by = float(problem.b @ z.y)
    cx = float(problem.c @ z.x)
    if z.tau > max(z.kappa, guard) * ratio:
        return Classification(OPTIMAL, x=z.x / z.tau, y=z.y / z.tau, s=z.s / z.tau)
    if z.kappa > max(z.tau, guard) * ratio:
        if by > 0.0:
            return Classification(PRIMAL_INFEASIBLE, y=z.y / by, s=z.s / by, details={"b_dot_y": by})
        if cx < 0.0:
            return Classification(DUAL_INFEASIBLE, x=z.x / -cx, details={"c_dot_x": cx})
    return Classification(UNKNOWN, details={"tau": z.tau, "kappa": z.kappa})
