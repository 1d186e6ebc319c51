"""Numerical checks of the per-iteration inequalities the method relies on.

Every verdict is phrased as lhs <= rhs. A verdict passes when its
preconditions held (applicable) and rhs - lhs >= -VERDICT_TOL (1 + |rhs|).
Inapplicable verdicts are reported but never count as failures.

Quantities are recomputed from the raw iterate vectors; the only solver
object taken as given is the scaling matrix that was actually used.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .central_path import ConicProblem, HsdPoint, NeighborhoodReport, PathQuantities, cone_quantities, mu_e_of, residual
from .cones import dual_membership_margin, membership_margin
from .errors import NsconicError
from .linalg import norm_dual, norm_induced
from .parameters import StepParameters
from .scaling import (
    ANALYSIS_RADIUS,
    SandwichBounds,
    ScalingMatrix,
    StepSandwichBounds,
    delta_d_residual,
    sandwich_bounds,
    sandwich_bounds_after_step,
    sandwich_margins,
)

logger = logging.getLogger(__name__)

VERDICT_TOL = 1e-8
IDENTITY_TOL = 1e-9
MAPPING_TOL = 1e-8


@dataclass(frozen=True)
class LemmaVerdict:
    check: str
    lhs: float
    rhs: float
    slack: float
    applicable: bool
    passed: bool
    iteration: Optional[int] = None

    @property
    def failed(self) -> bool:
        return self.applicable and not self.passed

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "iteration": self.iteration,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "applicable": self.applicable,
            "passed": self.passed,
        }


def verdict(check: str, lhs: float, rhs: float, applicable: bool = True, *, strict: bool = False) -> LemmaVerdict:
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    if not applicable:
        ok = False
    elif not math.isfinite(slack):
        ok = False
    elif strict:
        ok = slack > 0.0
    else:
        ok = slack >= -VERDICT_TOL * (1.0 + abs(rhs))
    return LemmaVerdict(check, lhs, rhs, slack, bool(applicable), ok)


def count_failures(verdicts: Sequence[LemmaVerdict]) -> int:
    return sum(1 for v in verdicts if v.failed)


def summarize(verdicts: Sequence[LemmaVerdict]) -> Dict[str, Dict[str, int]]:
    """Per check id: how many passed, failed and were inapplicable."""
    out: Dict[str, Counter] = {}
    for v in verdicts:
        c = out.setdefault(v.check, Counter())
        if not v.applicable:
            c["inapplicable"] += 1
        elif v.passed:
            c["passed"] += 1
        else:
            c["failed"] += 1
    return {k: {"passed": c["passed"], "failed": c["failed"], "inapplicable": c["inapplicable"]} for k, c in sorted(out.items())}


def _nan_on_error(fn, *args) -> float:
    try:
        return float(fn(*args))
    except (NsconicError, ValueError, ZeroDivisionError, np.linalg.LinAlgError):
        return math.nan


def _interior(problem: ConicProblem, z: HsdPoint) -> bool:
    return (
        z.tau > 0.0
        and z.kappa > 0.0
        and membership_margin(problem.cone, z.x) > 0.0
        and dual_membership_margin(problem.cone, z.s) > 0.0
    )


def recompute(problem: ConicProblem, z: HsdPoint) -> Optional[PathQuantities]:
    if not _interior(problem, z):
        return None
    try:
        return cone_quantities(problem.cone, z.x, z.s, tau_kappa=z.tau * z.kappa)
    except NsconicError as e:
        logger.warning("verifier could not recompute path quantities: %s", e)
        return None


def _bounds_at(d: float, nu: float) -> Optional[SandwichBounds]:
    if not (math.isfinite(d) and 0.0 <= d <= ANALYSIS_RADIUS):
        return None
    return sandwich_bounds(d, nu)


def _step_bounds(d_plus: float, d: float, nu: float) -> Optional[StepSandwichBounds]:
    ok = all(math.isfinite(v) and 0.0 <= v <= ANALYSIS_RADIUS for v in (d_plus, d))
    return sandwich_bounds_after_step(d_plus, d, nu) if ok else None


@dataclass(frozen=True)
class BoundContext:
    """Step-size dependent constants shared by the predictor and corrector checks.

    eps3, eps4 and crude_xtilde_bound belong to z+ and stay NaN until the
    predictor step is known.
    """

    theta: float
    omega1: float
    omega2: float
    decay: float
    nu: float
    eps3: float = math.nan
    eps4: float = math.nan
    crude_xtilde_bound: float = math.nan

    @classmethod
    def build(cls, params: StepParameters, nu: float) -> "BoundContext":
        return cls(params.theta(nu), params.omega1(nu), params.omega2(nu), params.decay(), nu)

    def after_step(self, step_bounds: Optional[StepSandwichBounds], delta_w_plus: float, mu_plus: float) -> "BoundContext":
        crude = delta_w_plus / (mu_plus * self.nu) + 1.0 / math.sqrt(mu_plus * self.nu) if mu_plus > 0.0 else math.nan
        return replace(
            self,
            eps3=step_bounds.eps3 if step_bounds else math.nan,
            eps4=step_bounds.eps4 if step_bounds else math.nan,
            crude_xtilde_bound=crude,
        )


def check_scaling(
    W: ScalingMatrix,
    pq: PathQuantities,
    x,
    s,
    bounds: Optional[SandwichBounds],
    prefix: str = "scaling",
) -> List[LemmaVerdict]:
    out: List[LemmaVerdict] = []
    d, mu = pq.delta_p_norm_x, pq.mu
    out.append(verdict(
        f"{prefix}.delta_d_to_delta_p",
        _nan_on_error(delta_d_residual, pq),
        mu * d * d / (1.0 - d) ** 3 if d < 1.0 else math.nan,
        d < 1.0,
    ))
    exact = not W.degenerate_fallback
    s_norm = max(float(np.linalg.norm(s)), 1e-300)
    st_norm = max(float(np.linalg.norm(pq.s_tilde)), 1e-300)
    out.append(verdict(f"{prefix}.maps_x_to_s", float(np.linalg.norm(W.w @ x - s)) / s_norm, MAPPING_TOL, exact))
    out.append(verdict(
        f"{prefix}.maps_shadow", float(np.linalg.norm(W.w @ pq.x_tilde - pq.s_tilde)) / st_norm, MAPPING_TOL, exact
    ))

    margins = None
    if bounds is not None:
        try:
            margins = sandwich_margins(W.w, pq.barrier.hessian, pq.dual_hessian_inverse, mu)
        except NsconicError as e:
            logger.warning("sandwich margins unavailable: %s", e)
    ok = margins is not None
    nan = math.nan
    out.append(verdict(f"{prefix}.primal_lower", bounds.l_p if ok else nan, margins.primal_min if ok else nan, ok))
    out.append(verdict(f"{prefix}.primal_upper", margins.primal_max if ok else nan, bounds.u_p if ok else nan, ok))
    out.append(verdict(f"{prefix}.dual_lower", bounds.l_d if ok else nan, margins.dual_min if ok else nan, ok))
    out.append(verdict(f"{prefix}.dual_upper", margins.dual_max if ok else nan, bounds.u_d if ok else nan, ok))
    return out


def check_predictor(
    problem: ConicProblem,
    predictor,
    pq: PathQuantities,
    pq_plus: Optional[PathQuantities],
    ctx: BoundContext,
    report: NeighborhoodReport,
    bounds: Optional[SandwichBounds],
    beta: float,
) -> List[LemmaVerdict]:
    """Checks on the predictor direction and the step from z to z+."""
    z, zp, d = predictor.z, predictor.z_plus, predictor.direction
    alpha, gamma = predictor.alpha, predictor.gamma
    W = predictor.scaling
    nu, theta = ctx.nu, ctx.theta
    full = report.all_hold
    basic = report.a1 and report.a3

    xs = float(d.dx @ d.ds)
    tk = d.dtau * d.dkappa
    out: List[LemmaVerdict] = []
    scale = float(np.linalg.norm(d.dx) * np.linalg.norm(d.ds)) + abs(tk)
    out.append(verdict("predictor.orthogonality", abs(xs + tk), IDENTITY_TOL * scale, basic))

    g = residual(problem, z)
    gp = residual(problem, zp)
    f = ctx.decay
    out.append(verdict(
        "predictor.residual_factor",
        float(np.linalg.norm(gp - f * g)),
        IDENTITY_TOL * (1.0 + float(np.linalg.norm(g))),
        basic,
    ))
    mu_e = mu_e_of(z, nu)
    mu_e_plus = mu_e_of(zp, nu)
    out.append(verdict("predictor.complementarity_factor", abs(mu_e_plus - f * mu_e), IDENTITY_TOL * mu_e, basic))

    nw = _nan_on_error(lambda: W.norm(d.dx) ** 2 + W.dual_norm(d.ds) ** 2)
    out.append(verdict("predictor.norm_w", nw, mu_e * theta, full))

    dx_x = _nan_on_error(norm_induced, d.dx, pq.barrier.hessian)
    ds_s = _nan_on_error(norm_dual, d.ds, pq.dual_hessian_inverse)
    has_bounds = bounds is not None and bounds.u_d > 0.0
    local = bounds.l_p * dx_x ** 2 + ds_s ** 2 / bounds.u_d if has_bounds else math.nan
    out.append(verdict("predictor.norm_local", local, theta / beta, full and has_bounds))

    out.append(verdict("predictor.inner_product", abs(xs), 0.5 * mu_e * theta, full))
    out.append(verdict("predictor.inner_product_mu", abs(xs), theta * pq.mu / (2.0 * beta), full))

    mu_plus = float(zp.x @ zp.s) / nu
    ratio = mu_plus / pq.mu
    identity = 1.0 + alpha * alpha * xs / (pq.mu * nu) + alpha * (gamma * mu_e / pq.mu - 1.0)
    exact_w = not W.degenerate_fallback
    out.append(verdict("predictor.mu_ratio_identity", abs(ratio - identity), IDENTITY_TOL * ratio, basic and exact_w))
    out.append(verdict("predictor.mu_ratio_bound", ratio, ctx.omega1, full))

    tk0 = z.tau * z.kappa
    out.append(verdict(
        "predictor.delta_tau_kappa", tk, (gamma * mu_e - tk0) ** 2 / (4.0 * tk0), basic and gamma >= 0.0
    ))
    lower = (mu_e_plus / f) * (beta * (1.0 - alpha) + alpha * gamma - 0.5 * alpha * alpha * theta) if f > 0.0 else math.nan
    out.append(verdict("predictor.tau_kappa_lower", lower, zp.tau * zp.kappa, full and alpha <= 1.0 and f > 0.0))

    root = (gamma - beta + math.sqrt((beta - gamma) ** 2 + 2.0 * beta * theta)) / theta if theta > 0.0 else math.inf
    positive_ok = full and (beta < 1.0 or gamma < 1.0) and alpha < root
    out.append(verdict("predictor.tau_kappa_positive", 0.0, min(zp.tau, zp.kappa), positive_ok, strict=True))

    shadow_ok = False
    bound = math.nan
    if full and bounds is not None and bounds.l_p > 0.0 and bounds.u_p > 0.0 and theta > 0.0:
        lp, up, ud = bounds.l_p, bounds.u_p, bounds.u_d
        d0 = pq.delta_p_norm_x
        limit = math.sqrt(beta * min(lp, 1.0 / up) / theta)
        den_p = 1.0 - alpha * math.sqrt(theta / (beta * lp))
        den_d = 1.0 - alpha * math.sqrt(ud * theta / beta)
        shadow_ok = alpha < limit and den_p > 0.0 and den_d > 0.0 and d0 < 1.0 and pq_plus is not None
        if shadow_ok:
            bound = (
                (1.0 - alpha) * d0
                + alpha * alpha * theta / (2.0 * beta * math.sqrt(nu) * (1.0 - d0))
                + alpha * math.sqrt(theta / (lp * beta)) * (ctx.omega1 * (ud / den_d - 1.0) + ctx.omega2)
            ) / den_p
    lhs = pq_plus.delta_p_norm_x if pq_plus is not None else math.nan
    out.append(verdict("predictor.shadow_distance", lhs, bound, shadow_ok))
    return out


def _corrector_shadow_product_bound(x_norm: float, D: float, mu: float, nu: float, ld: float, ud: float) -> float:
    a = 1.0 - D / math.sqrt(ld * mu)
    b = 1.0 - math.sqrt(ud / mu) * D
    return (
        1.0
        + D * (x_norm * (1.0 / (ld * a) - 1.0) + ud / math.sqrt(mu * nu) * (1.0 / b - 1.0))
        + D * D * ud / (mu * nu * ld * a * b)
    )


def check_corrector(
    problem: ConicProblem,
    corrector,
    pq_plus: Optional[PathQuantities],
    pq_pp: Optional[PathQuantities],
    step_bounds: Optional[StepSandwichBounds],
) -> List[LemmaVerdict]:
    """Checks on the corrector step from z+ to z++."""
    zp, zpp, d = corrector.z_plus, corrector.z_plus_plus, corrector.direction
    Wp = corrector.scaling
    nu = problem.nu
    basic = pq_plus is not None
    scaled = corrector.variant == "scaled"
    out: List[LemmaVerdict] = []

    gp = residual(problem, zp)
    gpp = residual(problem, zpp)
    out.append(verdict(
        "corrector.residual_unchanged",
        float(np.linalg.norm(gpp - gp)),
        IDENTITY_TOL * (1.0 + float(np.linalg.norm(gp))),
        basic,
    ))
    cross = float(zp.x @ d.ds + d.dx @ zp.s)
    cross_scale = float(np.linalg.norm(zp.x) * np.linalg.norm(d.ds) + np.linalg.norm(d.dx) * np.linalg.norm(zp.s))
    out.append(verdict("corrector.orthogonal_xs", abs(cross), IDENTITY_TOL * cross_scale, basic and scaled))
    xs = float(d.dx @ d.ds)
    tk = d.dtau * d.dkappa
    scale = float(np.linalg.norm(d.dx) * np.linalg.norm(d.ds)) + abs(tk)
    out.append(verdict("corrector.orthogonality", abs(xs + tk), IDENTITY_TOL * scale, basic))

    scaled_ok = basic and scaled
    mu_e_p = mu_e_of(zp, nu)
    out.append(verdict(
        "corrector.complementarity", abs(mu_e_of(zpp, nu) - mu_e_p), IDENTITY_TOL * mu_e_p, scaled_ok
    ))

    D = _nan_on_error(Wp.norm, pq_plus.delta_p) if basic else math.nan
    nw = _nan_on_error(lambda: Wp.norm(d.dx) ** 2 + Wp.dual_norm(d.ds) ** 2)
    out.append(verdict("corrector.norm_w", nw, D * D, scaled_ok))
    out.append(verdict("corrector.inner_product", abs(xs), 0.5 * D * D, scaled_ok))
    tk_floor = zp.tau * zp.kappa - 0.5 * D * D
    out.append(verdict("corrector.tau_kappa", tk_floor, zpp.tau * zpp.kappa, scaled_ok))
    out.append(verdict(
        "corrector.tau_kappa_positive", 0.0, min(zpp.tau, zpp.kappa), scaled_ok and tk_floor > 0.0, strict=True
    ))

    mu_p = pq_plus.mu if basic else math.nan
    x_norm = _nan_on_error(lambda: Wp.norm(pq_plus.x_tilde) / nu) if basic else math.nan
    crude = D / (mu_p * nu) + 1.0 / math.sqrt(mu_p * nu) if basic else math.nan
    out.append(verdict("corrector.crude_xtilde", x_norm, crude, scaled_ok))

    product = pq_plus.mu * pq_pp.mu_tilde if basic and pq_pp is not None else math.nan
    sp_ok = False
    sp_bound = sp_crude = math.nan
    if scaled_ok and pq_pp is not None and step_bounds is not None and math.isfinite(D):
        ld, ud = step_bounds.l_d, step_bounds.u_d
        if ld > 0.0 and ud > 0.0:
            sp_ok = (
                D / math.sqrt(mu_p) < math.sqrt(min(ld, 1.0 / ud))
                and 1.0 - math.sqrt(ud / mu_p) * D > 0.0
            )
        if sp_ok:
            sp_bound = _corrector_shadow_product_bound(x_norm, D, mu_p, nu, ld, ud)
            sp_crude = _corrector_shadow_product_bound(crude, D, mu_p, nu, ld, ud)
    out.append(verdict("corrector.shadow_product", product, sp_bound, sp_ok))
    out.append(verdict("corrector.shadow_product_crude", product, sp_crude, sp_ok))

    sd_ok = False
    sd_bound = math.nan
    if scaled_ok and pq_pp is not None and step_bounds is not None and math.isfinite(D):
        lp, up, ud = step_bounds.l_p, step_bounds.u_p, step_bounds.u_d
        if lp > 0.0 and up > 0.0 and ud > 0.0:
            q = math.sqrt(mu_p * lp)
            tail = 1.0 - math.sqrt(ud / mu_p) * D
            if D / math.sqrt(mu_p) < math.sqrt(min(lp, 1.0 / up)) and tail > 0.0 and 1.0 - D / q > 0.0:
                b1 = D / ((1.0 - D / q) * q) * (ud / tail - 1.0)
                if 1.0 - b1 > 0.0:
                    sd_ok = True
                    sd_bound = b1 + D * D / (2.0 * mu_p * math.sqrt(nu)) / (1.0 - b1)
    lhs = pq_pp.delta_p_norm_x if pq_pp is not None else math.nan
    out.append(verdict("corrector.shadow_distance", lhs, sd_bound, sd_ok))
    return out


def check_centrality(pq: Optional[PathQuantities], report: NeighborhoodReport, beta: float) -> List[LemmaVerdict]:
    """Relations between mu, mu_e and the shadow products inside the neighborhood."""
    ok = pq is not None and report.a1
    nan = math.nan
    floor = 1.0 - IDENTITY_TOL
    mu = pq.mu if ok else nan
    mu_e = pq.mu_e if ok else nan
    mid = ok and report.a2 and report.a4
    return [
        verdict("centrality.shadow_product", floor, mu * pq.mu_tilde if ok else nan, ok),
        verdict("centrality.extended_product", floor, mu_e * pq.mu_tilde_e if ok else nan, ok and report.a3),
        verdict("centrality.mu_e_lower", mu / (2.0 - beta), mu_e, mid),
        verdict("centrality.mu_e_upper", mu_e, mu / beta, mid),
    ]


def verify_iteration(
    problem: ConicProblem,
    predictor,
    corrector,
    params: StepParameters,
    report_z: NeighborhoodReport,
    report_pp: NeighborhoodReport,
    iteration: Optional[int] = None,
) -> Tuple[List[LemmaVerdict], Dict[str, float]]:
    """All per-iteration checks, plus the measurements the constants audit reads."""
    nu = problem.nu
    z, zp, zpp = predictor.z, predictor.z_plus, corrector.z_plus_plus
    ctx = BoundContext.build(
        StepParameters(predictor.alpha, params.beta, predictor.gamma, params.eta), nu
    )
    pq = recompute(problem, z)
    pq_p = recompute(problem, zp)
    pq_pp = recompute(problem, zpp)

    verdicts: List[LemmaVerdict] = []
    d = pq.delta_p_norm_x if pq is not None else math.nan
    d_p = pq_p.delta_p_norm_x if pq_p is not None else math.nan
    bounds = _bounds_at(d, nu)
    step_bounds = _step_bounds(d_p, d, nu)

    if pq is not None:
        verdicts += check_scaling(predictor.scaling, pq, z.x, z.s, bounds, "scaling")
        verdicts += check_predictor(problem, predictor, pq, pq_p, ctx, report_z, bounds, params.beta)
    if pq_p is not None and corrector.variant == "scaled":
        verdicts += check_scaling(
            corrector.scaling, pq_p, zp.x, zp.s, step_bounds.bounds if step_bounds else None, "scaling.plus"
        )
    verdicts += check_corrector(problem, corrector, pq_p, pq_pp, step_bounds)
    verdicts += check_centrality(pq_pp, report_pp, params.beta)
    verdicts = [replace(v, iteration=iteration) for v in verdicts]

    dc = corrector.direction
    dp = predictor.direction
    D = _nan_on_error(corrector.scaling.norm, pq_p.delta_p) if pq_p is not None else math.nan
    ctx = ctx.after_step(step_bounds, D, pq_p.mu if pq_p is not None else math.nan)
    nan = math.nan
    measurements = {
        "theta": ctx.theta,
        "omega1": ctx.omega1,
        "delta": d,
        "delta_plus": d_p,
        "delta_plus_plus": pq_pp.delta_p_norm_x if pq_pp is not None else nan,
        "l_p": bounds.l_p if bounds else nan,
        "u_d": bounds.u_d if bounds else nan,
        "l_p_plus": step_bounds.l_p if step_bounds else nan,
        "l_d_plus": step_bounds.l_d if step_bounds else nan,
        "u_p_plus": step_bounds.u_p if step_bounds else nan,
        "u_d_plus": step_bounds.u_d if step_bounds else nan,
        "l_p_plus_printed": step_bounds.l_p_printed if step_bounds else nan,
        "l_p_plus_symmetric": step_bounds.l_p_symmetric if step_bounds else nan,
        "eps3": ctx.eps3,
        "eps4": ctx.eps4,
        "crude_xtilde_bound": ctx.crude_xtilde_bound,
        "predictor_dx_radius": predictor.alpha * _nan_on_error(norm_induced, dp.dx, pq.barrier.hessian) if pq else nan,
        "predictor_ds_radius": predictor.alpha * _nan_on_error(norm_dual, dp.ds, pq.dual_hessian_inverse) if pq else nan,
        "corrector_dx_radius": _nan_on_error(norm_induced, dc.dx, pq_p.barrier.hessian) if pq_p else nan,
        "corrector_ds_radius": _nan_on_error(norm_dual, dc.ds, pq_p.dual_hessian_inverse) if pq_p else nan,
        "delta_w_plus": D,
        "mu_plus": pq_p.mu if pq_p else nan,
        "mu_e": mu_e_of(z, nu),
        "mu_e_over_mu_plus": mu_e_of(z, nu) / pq_p.mu if pq_p else nan,
        "shadow_product_plus": pq_p.mu * pq_pp.mu_tilde if pq_p and pq_pp else nan,
    }
    return verdicts, measurements


def check_theoretical_constants(records: Sequence, nu: float, params: StepParameters) -> List[LemmaVerdict]:
    """Compare measured per-iteration quantities with the fixed constants of the default schedule."""
    applicable = params.is_theoretical(nu)
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    theta = params.theta(nu)
    w1 = params.omega1(nu)
    rn = math.sqrt(nu)
    out = [
        verdict("constants.theta", abs(theta - 0.1 * (nu + 1.0)), 1e-12 * (nu + 1.0), applicable),
        verdict("constants.tau_kappa_step", alpha, math.sqrt(18.0 / (nu + 1.0)), applicable, strict=True),
        verdict("constants.omega1", w1, 1.0 + 1.0 / 90000.0, applicable),
        verdict(
            "constants.shadow_product_margin",
            0.00077 / nu,
            alpha * gamma * (1.0 - beta) - alpha * alpha * theta / (2.0 * nu),
            applicable,
        ),
    ]
    mu_e_ratio = 1.0 / ((1.0 - alpha) * beta + alpha * gamma - 0.5 * alpha * alpha * theta / nu)
    for rec in records:
        m = getattr(rec, "measurements", None) or {}
        if not m:
            continue
        it = rec.iteration
        get = lambda k: float(m.get(k, math.nan))  # noqa: E731
        mu_plus = get("mu_plus")
        d_plus = get("delta_plus")
        u_p_plus = get("u_p_plus")
        product = get("shadow_product_plus")
        checks = [
            ("constants.l_p", 0.97966, get("l_p")),
            ("constants.u_d", get("u_d"), 1.02546),
            ("constants.delta_after_predictor", d_plus, 0.00747 / rn),
            ("constants.l_p_plus", 0.93719, get("l_p_plus")),
            ("constants.l_d_plus", 0.92326, get("l_d_plus")),
            ("constants.u_p_plus", u_p_plus, 1.06281),
            ("constants.u_d_plus", get("u_d_plus"), 1.07885),
            ("constants.delta_after_corrector", get("delta_plus_plus"), 0.00074 / rn),
            ("constants.predictor_dx_radius", get("predictor_dx_radius"), 0.00477),
            ("constants.predictor_ds_radius", get("predictor_ds_radius"), 0.00478),
            ("constants.corrector_dx_radius", get("corrector_dx_radius"), 0.00796),
            ("constants.corrector_ds_radius", get("corrector_ds_radius"), 0.00800),
            ("constants.delta_w_plus", get("delta_w_plus"), 0.00771 * math.sqrt(mu_plus / nu)),
            (
                "constants.tau_kappa_chain",
                0.5 * alpha * alpha * theta + 0.5 * u_p_plus * (2.0 - beta) * w1 * d_plus * d_plus,
                (1.0 - beta) * alpha * gamma,
            ),
            ("constants.mu_e_over_mu_plus", get("mu_e_over_mu_plus"), mu_e_ratio),
            ("constants.shadow_product_chain", beta * params.decay() * (product - 1.0), 0.00077 / nu),
            ("constants.shadow_product", product - 1.0, 0.00077 / nu),
        ]
        out.extend(replace(verdict(name, lhs, rhs, applicable), iteration=it) for name, lhs, rhs in checks)
    return out


def audit_trace(records: Sequence, nu: float, beta: float, eta: float) -> List[LemmaVerdict]:
    """Consistency of a full trace: decay laws, neighborhood membership and recorded failures."""
    if not records:
        return [verdict("trace.nonempty", 1.0, 0.0)]
    out: List[LemmaVerdict] = []
    mu0 = records[0].mu_e
    g0 = records[0].res_norm
    factor = 1.0
    for k, rec in enumerate(records):
        row: List[LemmaVerdict] = [verdict("trace.iteration_index", abs(rec.iteration - k), 0.0)]
        if k > 0:
            factor *= 1.0 - rec.alpha * (1.0 - rec.gamma)
            want_mu = factor * mu0
            want_g = factor * g0
            row.append(verdict("trace.mu_e_decay", abs(rec.mu_e - want_mu), 1e-8 * want_mu + 1e-12 * mu0))
            row.append(verdict("trace.residual_decay", abs(rec.res_norm - want_g), 1e-8 * want_g + 1e-12 * g0))
        row.append(verdict("trace.tau_kappa_positive", 0.0, min(rec.tau, rec.kappa), strict=True))
        row.append(verdict("trace.tau_kappa_neighborhood", beta * rec.mu_e, rec.tau * rec.kappa))
        flags = rec.assumptions.flags()
        row.append(verdict("trace.assumptions", float(sum(1 for f in flags if not f)), 0.0))
        row.append(verdict("trace.delta_within_eta", rec.delta_p_norm_x, eta))
        row.append(verdict("trace.verdict_failures", float(rec.verdict_failures), 0.0))
        out.extend(replace(v, iteration=rec.iteration) for v in row)
    return out
