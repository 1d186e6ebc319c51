from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nsconic.central_path import (
    DUAL_INFEASIBLE,
    OPTIMAL,
    PRIMAL_INFEASIBLE,
    UNKNOWN,
    ConicProblem,
    HsdPoint,
    check_assumptions,
    check_row_rank,
    classify_solution,
    cone_quantities,
    initial_hsd_point,
    path_quantities,
    residual,
    row_rank,
    skew_form,
)
from nsconic.cones import ExponentialCone, NonnegOrthant
from nsconic.errors import DimensionMismatch, NotInterior
from nsconic.parameters import theoretical_eta
from nsconic.problems import exp_problem, power_problem, tiny_lp


def test_problem_validation():
    with pytest.raises(DimensionMismatch):
        ConicProblem(np.ones((1, 2)), np.ones(2), np.ones(2), NonnegOrthant(2))
    with pytest.raises(DimensionMismatch):
        ConicProblem(np.ones((1, 2)), np.ones(1), np.ones(3), NonnegOrthant(2))
    with pytest.raises(DimensionMismatch):
        ConicProblem(np.ones((1, 3)), np.ones(1), np.ones(3), NonnegOrthant(2))
    with pytest.raises(DimensionMismatch):
        ConicProblem(np.array([[1.0, np.inf]]), np.ones(1), np.ones(2), NonnegOrthant(2))


def test_row_rank(caplog):
    assert row_rank(np.array([[1.0, 1.0], [2.0, 2.0]])) == 1
    assert row_rank(np.eye(3)) == 3
    bad = ConicProblem(np.array([[1.0, 1.0], [2.0, 2.0]]), np.array([1.0, 2.0]), np.ones(2), NonnegOrthant(2))
    with caplog.at_level("WARNING"):
        assert not check_row_rank(bad)
    assert "rank 1" in caplog.text


def test_residual_linear_and_zero():
    p = tiny_lp()
    zero = HsdPoint(np.zeros(1), np.zeros(2), 0.0, np.zeros(2), 0.0)
    assert_allclose(residual(p, zero), 0.0)
    z = initial_hsd_point(p)
    assert_allclose(residual(p, z.scaled(2.0)), 2.0 * residual(p, z))


def test_residual_at_initial_point():
    p = tiny_lp()
    z = initial_hsd_point(p)
    # [Ax - b tau; -A'y + c tau - s; b'y - c'x - kappa]
    assert_allclose(residual(p, z), [1.0, 0.0, 1.0, -4.0])


def test_residual_shape_check():
    p = tiny_lp()
    z = HsdPoint(np.zeros(2), np.ones(2), 1.0, np.ones(2), 1.0)
    with pytest.raises(DimensionMismatch):
        residual(p, z)


def test_skew_form_vanishes(rng):
    p = exp_problem()
    for _ in range(10):
        y, x = rng.standard_normal(p.m), rng.standard_normal(p.n)
        assert abs(skew_form(p, y, x, float(rng.standard_normal()))) <= 1e-12


@pytest.mark.parametrize("make", [tiny_lp, exp_problem, power_problem])
def test_initial_point_quantities(make):
    p = make()
    z = initial_hsd_point(p)
    pq = path_quantities(p, z)
    assert pq.mu == pytest.approx(1.0, rel=1e-12)
    assert pq.mu_e == pytest.approx(1.0, rel=1e-12)
    assert pq.mu * pq.mu_tilde == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.norm(pq.delta_p) <= 1e-9
    assert np.linalg.norm(pq.delta_d) <= 1e-9
    report = check_assumptions(p, z, 0.9, theoretical_eta(p.nu), pq=pq)
    assert report.all_hold


def test_central_point_has_unit_shadow_product():
    cone = NonnegOrthant(3)
    x = np.array([1.0, 2.0, 4.0])
    s = 0.5 / x
    pq = cone_quantities(cone, x, s)
    assert pq.mu * pq.mu_tilde == pytest.approx(1.0, abs=1e-9)
    assert pq.delta_p_norm_x <= 1e-12


def test_orthant_shadow_quantities(rng):
    cone = NonnegOrthant(4)
    for _ in range(20):
        x, s = rng.uniform(0.1, 3.0, 4), rng.uniform(0.1, 3.0, 4)
        pq = cone_quantities(cone, x, s)
        assert pq.mu * pq.mu_tilde >= 1.0 - 1e-12
        assert_allclose(pq.x_tilde, 1.0 / s)
        assert_allclose(pq.s_tilde, 1.0 / x)
        assert_allclose(pq.delta_p, x - pq.mu / s)
        assert_allclose(pq.dual_hessian_inverse, np.diag(s ** 2))
        assert pq.mu_e * pq.mu_tilde_e >= 1.0 - 1e-12


def test_path_quantities_rejects_negative_tau():
    p = tiny_lp()
    z = initial_hsd_point(p)
    bad = HsdPoint(z.y, z.x, -1.0, z.s, z.kappa)
    with pytest.raises(NotInterior):
        path_quantities(p, bad)


def test_assumptions_report_flags():
    p = tiny_lp()
    z = initial_hsd_point(p)
    flipped = HsdPoint(z.y, z.x, -1.0, z.s, z.kappa)
    report = check_assumptions(p, flipped, 0.9, 0.01)
    assert not report.a3
    assert not report.a2
    assert report.a1


def test_tau_kappa_boundary_is_inclusive():
    p = tiny_lp()
    x = np.ones(2)
    s = np.ones(2)
    # mu_e = (2 + 1) / 3 = 1 = tau kappa
    z = HsdPoint(np.zeros(1), x, 1.0, s, 1.0)
    report = check_assumptions(p, z, 1.0, 0.1)
    assert report.tau_kappa_slack == 0.0
    assert report.a2


def test_assumptions_never_raise_outside_cone():
    p = exp_problem()
    z = initial_hsd_point(p)
    outside = HsdPoint(z.y, np.array([-1.0, 1.0, 0.0]), 1.0, z.s, 1.0)
    report = check_assumptions(p, outside, 0.9, 0.01)
    assert not report.a1
    assert not report.a4 and not report.a5
    assert math.isnan(report.shadow_slack)


def test_classification():
    p = tiny_lp()
    y, x, s = np.array([0.3]), np.array([1.0, 0.5]), np.array([0.2, 0.1])
    opt = classify_solution(p, HsdPoint(y, x, 1.0, s, 1e-12))
    assert opt.status == OPTIMAL
    assert_allclose(opt.x, x)

    infeasible = classify_solution(p, HsdPoint(y, x, 1e-12, s, 1.0))
    assert infeasible.status == PRIMAL_INFEASIBLE
    assert infeasible.details["b_dot_y"] == pytest.approx(0.3)
    assert float(p.b @ infeasible.y) == pytest.approx(1.0)

    unbounded = classify_solution(p, HsdPoint(np.array([-0.3]), np.array([1.0, -1.0]), 1e-12, s, 1.0))
    assert unbounded.status == DUAL_INFEASIBLE
    assert float(p.c @ unbounded.x) == pytest.approx(-1.0)

    assert classify_solution(p, HsdPoint(y, x, 1e-9, s, 1e-9)).status == UNKNOWN


def test_exponential_problem_point_is_interior():
    p = exp_problem()
    assert isinstance(p.cone, ExponentialCone)
    z = initial_hsd_point(p)
    assert path_quantities(p, z).nu == 3.0


def test_assumptions_propagate_programming_errors():
    p = tiny_lp()
    z = initial_hsd_point(p)
    with pytest.raises(AttributeError):
        check_assumptions(p, z, 0.9, 0.01, pq=object())
