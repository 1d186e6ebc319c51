from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nsconic.central_path import cone_quantities
from nsconic.cones import ExponentialCone, NonnegOrthant, PowerCone, initial_point, product
from nsconic.errors import OutOfAnalysisRegion
from nsconic.linalg import cholesky
from nsconic.scaling import (
    ScalingMatrix,
    build_scaling,
    delta_d_residual,
    hessian_scaling,
    sandwich_bounds,
    sandwich_bounds_after_step,
    sandwich_margins,
    verify_sandwich,
)

CONES = [NonnegOrthant(3), ExponentialCone(), PowerCone(0.6), product([NonnegOrthant(2), ExponentialCone()])]


def near_central(cone, rng, spread: float = 0.02):
    x0 = initial_point(cone)
    x = x0 * (1.0 + spread * rng.uniform(-1.0, 1.0, cone.dim))
    s = 0.7 * x0 * (1.0 + spread * rng.uniform(-1.0, 1.0, cone.dim))
    return x, s


@pytest.mark.parametrize("cone", CONES, ids=lambda c: c.kind)
def test_scaling_maps_point_and_shadow(cone, rng):
    for _ in range(20):
        x, s = near_central(cone, rng)
        pq = cone_quantities(cone, x, s)
        W = build_scaling(x, s, pq)
        assert_allclose(W.w, W.w.T)
        assert_allclose(W.w @ x, s, rtol=1e-8, atol=1e-10)
        if not W.degenerate_fallback:
            assert_allclose(W.w @ pq.x_tilde, pq.s_tilde, rtol=1e-7, atol=1e-9)
        assert_allclose(W.solve(s), x, rtol=1e-8, atol=1e-10)
        assert W.norm(x) == pytest.approx(math.sqrt(float(x @ s)), rel=1e-8)


@pytest.mark.parametrize("cone", CONES, ids=lambda c: c.kind)
def test_scaling_within_sandwich_bounds(cone, rng):
    for _ in range(20):
        x, s = near_central(cone, rng)
        pq = cone_quantities(cone, x, s)
        W = build_scaling(x, s, pq)
        sb = sandwich_bounds(pq.delta_p_norm_x, pq.nu)
        assert verify_sandwich(W, pq.barrier, pq.dual_hessian_inverse, pq.mu, sb)


def test_orthant_fallback_on_central_pair():
    cone = NonnegOrthant(2)
    x, s = np.array([1.0, 2.0]), np.array([2.0, 1.0])
    pq = cone_quantities(cone, x, s)
    assert pq.delta_p_norm_x == 0.0
    W = build_scaling(x, s, pq)
    assert W.degenerate_fallback
    assert_allclose(W.w @ x, s)
    assert_allclose(W.w @ pq.x_tilde, pq.s_tilde)


def test_off_central_pair_uses_full_update():
    # mu = 1.001, x_tilde = (1, 1), dP = (-1e-3, 1e-3)
    cone = NonnegOrthant(2)
    x, s = np.array([1.0, 1.002]), np.ones(2)
    pq = cone_quantities(cone, x, s)
    assert 1e-3 < pq.delta_p_norm_x < 2e-3
    W = build_scaling(x, s, pq)
    assert not W.degenerate_fallback
    assert_allclose(W.w @ x, s, rtol=1e-8)
    assert_allclose(W.w @ pq.x_tilde, pq.s_tilde, rtol=1e-7)
    sb = sandwich_bounds(pq.delta_p_norm_x, pq.nu)
    assert verify_sandwich(W, pq.barrier, pq.dual_hessian_inverse, pq.mu, sb)


def test_bounds_at_zero_distance():
    sb = sandwich_bounds(0.0, 5.0)
    assert (sb.l_p, sb.u_p, sb.l_d, sb.u_d) == (1.0, 1.0, 1.0, 1.0)


def test_bounds_at_theoretical_radius():
    nu = 3.0
    sb = sandwich_bounds(1.0 / (400.0 * math.sqrt(nu)), nu)
    assert sb.l_p >= 0.97966
    assert sb.u_d <= 1.02546
    assert sb.l_d <= sb.l_p <= 1.0 <= sb.u_p <= sb.u_d


def test_bounds_monotone_in_distance():
    prev = sandwich_bounds(0.0, 3.0)
    for d in np.linspace(0.01, 0.15, 8):
        sb = sandwich_bounds(float(d), 3.0)
        assert sb.l_p < prev.l_p
        assert sb.u_d > prev.u_d
        prev = sb


def test_bounds_outside_region():
    with pytest.raises(OutOfAnalysisRegion):
        sandwich_bounds(0.2, 3.0)
    with pytest.raises(ValueError):
        sandwich_bounds(-0.01, 3.0)


def test_step_bounds_take_smaller_lower_reading():
    sb = sandwich_bounds_after_step(0.01, 0.002, 3.0)
    assert sb.l_p == min(sb.l_p_printed, sb.l_p_symmetric)
    assert sb.l_p_printed == pytest.approx(1.0 - sb.eps3 - sb.eps2)
    assert sb.l_p_symmetric == pytest.approx(1.0 - sb.eps3 - sb.eps4)
    assert sb.u_p == pytest.approx(1.0 + sb.eps3 + sb.eps4)


def test_inflated_scaling_fails_sandwich(rng):
    cone = ExponentialCone()
    x, s = near_central(cone, rng)
    pq = cone_quantities(cone, x, s)
    w = 2.0 * pq.mu * pq.barrier.hessian
    bad = ScalingMatrix(w=w, factor=cholesky(w), degenerate_fallback=False, mu=pq.mu)
    sb = sandwich_bounds(pq.delta_p_norm_x, pq.nu)
    assert not verify_sandwich(bad, pq.barrier, pq.dual_hessian_inverse, pq.mu, sb)
    margins = sandwich_margins(bad.w, pq.barrier.hessian, pq.dual_hessian_inverse, pq.mu)
    assert margins.primal_min == pytest.approx(2.0, rel=1e-9)


def test_sandwich_check_reports_failed_factorization(rng):
    cone = ExponentialCone()
    x, s = near_central(cone, rng)
    pq = cone_quantities(cone, x, s)
    W = build_scaling(x, s, pq)
    sb = sandwich_bounds(pq.delta_p_norm_x, pq.nu)
    assert not verify_sandwich(W, pq.barrier, -np.eye(3), pq.mu, sb)
    with pytest.raises(AttributeError):
        verify_sandwich(W, object(), pq.dual_hessian_inverse, pq.mu, sb)


def test_hessian_scaling_is_mu_hessian(rng):
    cone = PowerCone(0.6)
    x, s = near_central(cone, rng)
    pq = cone_quantities(cone, x, s)
    W = hessian_scaling(pq)
    assert_allclose(W.w, pq.mu * pq.barrier.hessian)
    assert not W.degenerate_fallback


def test_delta_d_residual_vanishes_on_central_pair():
    cone = NonnegOrthant(3)
    x = np.array([1.0, 2.0, 4.0])
    pq = cone_quantities(cone, x, 0.5 / x)
    assert delta_d_residual(pq) <= 1e-12
