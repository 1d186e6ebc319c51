from __future__ import annotations

import math
from dataclasses import replace

import pytest

from nsconic.central_path import check_assumptions, initial_hsd_point, path_quantities
from nsconic.formats import read_trace, write_trace
from nsconic.parameters import StepParameters, theoretical_parameters
from nsconic.problems import exp_problem, tiny_lp
from nsconic.solver import PredictorOutcome, corrector_step, predictor_step
from nsconic.verifier import (
    audit_trace,
    check_theoretical_constants,
    count_failures,
    summarize,
    verdict,
    verify_iteration,
)


def test_verdict_semantics():
    assert verdict("x", 1.0, 1.0).passed
    assert verdict("x", 1.0 + 1e-9, 1.0).passed
    assert not verdict("x", 1.1, 1.0).passed
    assert not verdict("x", 0.0, 0.0, strict=True).passed
    assert not verdict("x", math.nan, 1.0).passed
    off = verdict("x", 5.0, 1.0, applicable=False)
    assert not off.passed and not off.failed
    assert count_failures([off, verdict("x", 2.0, 1.0)]) == 1
    summary = summarize([off, verdict("x", 0.0, 1.0), verdict("x", 2.0, 1.0)])
    assert summary == {"x": {"passed": 1, "failed": 1, "inapplicable": 1}}


def _one_iteration(problem, scale: float = 1.0):
    params = theoretical_parameters(problem.nu)
    z = initial_hsd_point(problem)
    pq = path_quantities(problem, z)
    pred = predictor_step(problem, z, params.alpha, params.gamma, pq=pq)
    if scale != 1.0:
        d = pred.direction
        bad = replace(d, dy=scale * d.dy, dx=scale * d.dx, dtau=scale * d.dtau, ds=scale * d.ds, dkappa=scale * d.dkappa)
        pred = PredictorOutcome(z, z.advance(bad, params.alpha), bad, pred.affine, pred.centering,
                                pred.alpha, pred.gamma, pred.scaling, pq)
    cor = corrector_step(problem, pred.z_plus)
    report_z = check_assumptions(problem, z, params.beta, params.eta, pq=pq)
    report_pp = check_assumptions(problem, cor.z_plus_plus, params.beta, params.eta)
    return verify_iteration(problem, pred, cor, params, report_z, report_pp, iteration=1)


def test_clean_iteration_passes():
    verdicts, measurements = _one_iteration(exp_problem())
    assert count_failures(verdicts) == 0, [v.check for v in verdicts if v.failed]
    assert {v.iteration for v in verdicts} == {1}
    assert measurements["delta"] <= 1e-9
    assert measurements["l_p"] == pytest.approx(1.0, abs=1e-6)


def test_corrupted_direction_fails():
    verdicts, _ = _one_iteration(exp_problem(), scale=1.5)
    failed = {v.check for v in verdicts if v.failed}
    assert "predictor.residual_factor" in failed
    assert "predictor.complementarity_factor" in failed


def test_constants_inapplicable_off_schedule(lp_theoretical):
    nu = lp_theoretical.nu
    params = lp_theoretical.params
    off = StepParameters(params.alpha, 0.5, params.gamma, params.eta)
    verdicts = check_theoretical_constants(lp_theoretical.records[1:], nu, off)
    assert verdicts
    assert not any(v.applicable for v in verdicts)
    assert count_failures(verdicts) == 0


@pytest.mark.parametrize("fixture", ["exp_theoretical", "power_theoretical"])
def test_constants_hold_on_schedule(fixture, request):
    solver = request.getfixturevalue(fixture)
    verdicts = check_theoretical_constants(solver.records[1:], solver.nu, solver.params)
    assert count_failures(verdicts) == 0, [(v.check, v.iteration) for v in verdicts if v.failed][:5]
    assert "constants.shadow_product" in summarize(verdicts)


@pytest.mark.parametrize("fixture", ["lp_theoretical", "exp_theoretical", "power_theoretical"])
def test_trace_audit_clean_on_schedule(fixture, request):
    solver = request.getfixturevalue(fixture)
    p = solver.params
    verdicts = audit_trace(solver.records, solver.nu, p.beta, p.eta)
    assert count_failures(verdicts) == 0, [(v.check, v.iteration) for v in verdicts if v.failed][:5]


def test_empty_trace_fails():
    verdicts = audit_trace([], 2.0, 0.9, 0.01)
    assert [v.check for v in verdicts] == ["trace.nonempty"]
    assert count_failures(verdicts) == 1


def test_corrupted_trace_fails(lp_theoretical):
    p = lp_theoretical.params
    records = list(lp_theoretical.records)
    assert count_failures(audit_trace(records, lp_theoretical.nu, p.beta, p.eta)) == 0
    records[50] = replace(records[50], mu_e=2.0 * records[50].mu_e)
    failed = [v for v in audit_trace(records, lp_theoretical.nu, p.beta, p.eta) if v.failed]
    assert ("trace.mu_e_decay", 50) in [(v.check, v.iteration) for v in failed]
    assert {v.iteration for v in failed} == {50}


def test_replayed_trace_matches_inline_audit(lp_theoretical, tmp_path):
    p = lp_theoretical.params
    nu = lp_theoretical.nu
    path = write_trace(lp_theoretical.records, tmp_path / "trace.csv", nu=nu, beta=p.beta, eta=p.eta)
    data = read_trace(path)
    assert (data.nu, data.beta, data.eta) == (nu, p.beta, p.eta)
    assert len(data.rows) == len(lp_theoretical.records)
    inline = audit_trace(lp_theoretical.records, nu, p.beta, p.eta)
    replayed = audit_trace(data.rows, data.nu, data.beta, data.eta)
    assert [(v.check, v.iteration, v.passed) for v in replayed] == [(v.check, v.iteration, v.passed) for v in inline]
    assert data.rows[7].mu_e == lp_theoretical.records[7].mu_e


def test_lp_iteration_scaling_checks():
    verdicts, _ = _one_iteration(tiny_lp())
    by_check = {v.check: v for v in verdicts}
    for check in ("scaling.primal_lower", "scaling.primal_upper", "scaling.dual_lower", "scaling.dual_upper"):
        assert by_check[check].passed
