"""Primal-dual scaling matrix W and its Loewner sandwich bounds.

W = mu F''(x) + s s^T/(nu mu) - mu s~ s~^T/nu
    + dD dD^T/<dP, dD> - mu v v^T/(||x~||_x^2 - nu mu~^2),   v = F''(x)x~ - mu~ s~,

with dP = x - mu x~ and dD = s - mu s~. W maps x to s and x~ to s~.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .central_path import PathQuantities
from .errors import DegenerateDenominator, NsconicError, OutOfAnalysisRegion
from .linalg import CholeskyFactor, as_symmetric, cholesky, congruence_eigenvalues, norm_dual, norm_induced

logger = logging.getLogger(__name__)

ANALYSIS_RADIUS = 0.18226
# below this ||dP||_x the two Gram pairs are rounding noise and both are dropped
NOISE_FLOOR = 1e-6
GRAM_TOL = 1e-24
SANDWICH_SLACK = 1e-9


@dataclass(frozen=True)
class ScalingMatrix:
    w: np.ndarray
    factor: CholeskyFactor
    degenerate_fallback: bool
    mu: float

    def norm(self, v) -> float:
        return norm_induced(v, self.w)

    def dual_norm(self, v) -> float:
        return norm_dual(v, self.factor)

    def solve(self, rhs) -> np.ndarray:
        return self.factor.solve(np.asarray(rhs, dtype=float))


def _gram_pair(x, s, pq: PathQuantities):
    """The two rank-one corrections, projected so each vanishes on x exactly."""
    H = pq.barrier.hessian
    s_tilde = pq.s_tilde
    x_tilde = pq.x_tilde
    mu, mu_tilde = pq.mu, pq.mu_tilde

    dd = s - mu * s_tilde
    dd = dd - (float(dd @ x) / float(s_tilde @ x)) * s_tilde
    ip = -mu * float(x_tilde @ dd)
    if not ip > GRAM_TOL * mu * mu:
        raise DegenerateDenominator(f"<dP, dD> = {ip:.3e}")

    Hx = H @ x
    w = x_tilde - mu_tilde * x
    w = w - (float(w @ Hx) / float(x @ Hx)) * x
    v = H @ w
    den = float(w @ v)
    if not den > GRAM_TOL:
        raise DegenerateDenominator(f"||x~||_x^2 - nu mu~^2 = {den:.3e}")
    return np.outer(dd, dd) / ip - mu * np.outer(v, v) / den


def build_scaling(x, s, pq: PathQuantities) -> ScalingMatrix:
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    H = pq.barrier.hessian
    nu, mu = pq.nu, pq.mu
    s_tilde = pq.s_tilde
    base = mu * H + np.outer(s, s) / (nu * mu) - mu * np.outer(s_tilde, s_tilde) / nu

    fallback = pq.delta_p_norm_x < NOISE_FLOOR
    w = base
    if not fallback:
        try:
            w = base + _gram_pair(x, s, pq)
        except DegenerateDenominator as e:
            logger.debug("scaling fallback: %s", e)
            fallback = True
    elif pq.delta_p_norm_x > 0.0:
        logger.debug("scaling fallback: ||dP||_x = %.3e below noise floor", pq.delta_p_norm_x)
    w = as_symmetric(w)
    return ScalingMatrix(w=w, factor=cholesky(w), degenerate_fallback=fallback, mu=mu)


def hessian_scaling(pq: PathQuantities) -> ScalingMatrix:
    """mu F''(x) in place of W."""
    w = as_symmetric(pq.mu * pq.barrier.hessian)
    return ScalingMatrix(w=w, factor=cholesky(w), degenerate_fallback=False, mu=pq.mu)


def _eps1(d: float, nu: float) -> float:
    q = (1.0 - d) ** 3
    r = d + d * d / q
    return r * (r + 2.0 * math.sqrt(nu)) / nu


def _eps2(d: float) -> float:
    # the ratio term (3d^2/q + d)^2 / (d (1 - 3d/q)) written as d (3d/q + 1)^2 / (1 - 3d/q)
    q = (1.0 - d) ** 3
    t = 3.0 * d / q
    return 2.0 / (q - d) * (4.0 * d * d / q + 2.0 * d + d * (t + 1.0) ** 2 / (1.0 - t))


def _check_radius(d: float) -> None:
    if d < 0.0 or math.isnan(d):
        raise ValueError(f"distance must be non-negative, got {d}")
    if d > ANALYSIS_RADIUS:
        raise OutOfAnalysisRegion(f"||dP||_x = {d:.5f} exceeds {ANALYSIS_RADIUS}")


@dataclass(frozen=True)
class SandwichBounds:
    """l_p mu F''(x) <= W <= u_p mu F''(x) and (l_d/mu) F*''(s)^-1 <= W <= (u_d/mu) F*''(s)^-1."""

    eps1: float
    eps2: float
    l_p: float
    u_p: float
    l_d: float
    u_d: float
    d: float = 0.0

    @classmethod
    def from_eps(cls, eps1: float, eps2: float, d: float) -> "SandwichBounds":
        eps = eps1 + eps2
        shrink = (1.0 - d) ** 2
        return cls(eps1, eps2, 1.0 - eps, 1.0 + eps, (1.0 - eps) * shrink, (1.0 + eps) / shrink, d)


def sandwich_bounds(delta_p_norm_x: float, nu: float) -> SandwichBounds:
    d = float(delta_p_norm_x)
    _check_radius(d)
    return SandwichBounds.from_eps(_eps1(d, nu), _eps2(d), d)


@dataclass(frozen=True)
class StepSandwichBounds:
    """Bounds for W at z+ from ||dP+||_{x+}, with both readings of l_p."""

    eps3: float
    eps4: float
    eps2: float
    l_p_printed: float
    l_p_symmetric: float
    bounds: SandwichBounds

    @property
    def l_p(self) -> float:
        return self.bounds.l_p

    @property
    def u_p(self) -> float:
        return self.bounds.u_p

    @property
    def l_d(self) -> float:
        return self.bounds.l_d

    @property
    def u_d(self) -> float:
        return self.bounds.u_d


def sandwich_bounds_after_step(delta_plus: float, delta: float, nu: float) -> StepSandwichBounds:
    """l_p+ read as 1 - eps3 - eps2 (eps2 at z) or 1 - eps3 - eps4; the smaller one is used."""
    _check_radius(delta_plus)
    _check_radius(delta)
    eps3 = _eps1(delta_plus, nu)
    eps4 = _eps2(delta_plus)
    eps2 = _eps2(delta)
    sym = SandwichBounds.from_eps(eps3, eps4, delta_plus)
    printed = 1.0 - eps3 - eps2
    bounds = SandwichBounds(
        eps1=eps3,
        eps2=eps4,
        l_p=min(printed, sym.l_p),
        u_p=sym.u_p,
        l_d=sym.l_d,
        u_d=sym.u_d,
        d=delta_plus,
    )
    return StepSandwichBounds(eps3, eps4, eps2, printed, sym.l_p, bounds)


@dataclass(frozen=True)
class SandwichMargins:
    """Extreme congruence eigenvalues of W against mu F''(x) and F*''(s)^-1 / mu."""

    primal_min: float
    primal_max: float
    dual_min: float
    dual_max: float

    def holds(self, sb: SandwichBounds, slack: float = SANDWICH_SLACK) -> bool:
        return (
            self.primal_min >= sb.l_p - slack
            and self.primal_max <= sb.u_p + slack
            and self.dual_min >= sb.l_d - slack
            and self.dual_max <= sb.u_d + slack
        )


def sandwich_margins(w, hessian, dual_hessian_inverse, mu: float) -> SandwichMargins:
    w = np.asarray(w, dtype=float)
    primal = congruence_eigenvalues(w, mu * np.asarray(hessian, dtype=float))
    dual = congruence_eigenvalues(w, np.asarray(dual_hessian_inverse, dtype=float) / mu)
    return SandwichMargins(float(primal[0]), float(primal[-1]), float(dual[0]), float(dual[-1]))


def verify_sandwich(
    W: ScalingMatrix,
    be,
    dual_hessian_inverse,
    mu: float,
    sb: SandwichBounds,
    slack: float = SANDWICH_SLACK,
) -> bool:
    try:
        margins = sandwich_margins(W.w, be.hessian, dual_hessian_inverse, mu)
    except (NsconicError, np.linalg.LinAlgError, FloatingPointError) as e:  # a failed factorization is a failed check
        logger.warning("sandwich check could not run: %s", e)
        return False
    return margins.holds(sb, slack)


def delta_d_residual(pq: PathQuantities) -> float:
    """||mu F''(x) dP - dD||*_x."""
    H = pq.barrier.hessian
    return norm_dual(pq.mu * (H @ pq.delta_p) - pq.delta_d, H)
