"""Smoke tests for the nestfn extension module."""

import json
import math
import os
import subprocess

import pytest

import nestfn as nf


def test_eval_unit_point():
    params = nf.Parameters(3.0, 0.7, 0.4, 0.5, 0.5)
    out = nf.eval_v(params, nf.InputPoint(1.0, 1.0))
    assert out.v == pytest.approx(3.0, rel=1e-13)
    assert out.bracket == pytest.approx(1.0, rel=1e-13)


def test_eval_worked_point():
    params = nf.Parameters(1.0, 0.5, 0.5, 0.5, 0.5)
    out = nf.eval_v(params, nf.InputPoint(4.0, 1.0))
    assert out.h_value == pytest.approx(0.75, rel=1e-13)
    assert out.v == pytest.approx(144.0 / 121.0, rel=1e-13)


def test_parameter_validation_raises():
    with pytest.raises(ValueError):
        nf.Parameters(1.0, 0.5, 0.5, 0.0, 0.5)
    with pytest.raises(ValueError):
        nf.Parameters(1.0, 1.5, 0.5, 0.5, 0.5, strict=True)
    with pytest.raises(ValueError):
        nf.InputPoint(0.0, 1.0)


def test_gradient_and_elasticities():
    params = nf.Parameters(1.0, 0.5, 0.5, 0.5, 0.5)
    x = nf.InputPoint(4.0, 1.0)
    grad = nf.gradient(params, x)
    assert grad.dV_dK == pytest.approx(12.0 / 1331.0, rel=1e-12)
    assert grad.dV_dL == pytest.approx(-1200.0 / 1331.0, rel=1e-12)
    assert nf.elasticity_k(params, x) == pytest.approx(1.0 / 33.0, rel=1e-12)
    assert nf.elasticity_l(params, x) == pytest.approx(-25.0 / 33.0, rel=1e-12)


def test_substitution_elasticity_ces_oracle():
    params = nf.Parameters(1.0, 1.0, 0.4, 0.5, 0.5)
    se = nf.substitution_elasticity(params, nf.InputPoint(3.0, 1.7))
    assert not se.degenerate_direction
    assert se.value == pytest.approx(1.0 / 1.5, abs=1e-4)


def test_classification_and_reduction():
    form = nf.classify_special_case(nf.Parameters(1.0, 1.0, 1.0, 0.5, 0.3))
    assert form.tag == "PureCapitalIntensive"
    value = nf.reduced_eval(nf.Parameters(2.0, 1.0, 1.0, 0.5, 0.5), nf.InputPoint(4.0, 9.0), form)
    assert value == pytest.approx(0.5, rel=1e-13)


def test_homogeneity_degree():
    degree = nf.homogeneity_degree(nf.Parameters(1.0, 0.5, 0.5, 0.5, 0.5), nf.InputPoint(4.0, 1.0))
    assert degree == pytest.approx(-8.0 / 11.0, abs=1e-8)


def test_audit_worked_deviation():
    checks = {c.id: c for c in nf.audit_formulas(nf.Parameters(1.0, 0.5, 0.5, 0.5, 0.5),
                                                 nf.InputPoint(4.0, 1.0))}
    assert checks["elasticity_l_closed_form"].abs_deviation == pytest.approx(0.8826, abs=1e-3)
    assert not checks["elasticity_k_closed_form"].defined


def test_diagnostics_report_json():
    cfg = nf.ScanConfig(kmin=0.5, kmax=10.0, lmin=0.5, lmax=10.0, grid=6, samples=500, seed=7)
    text = nf.run_diagnostics(nf.Parameters(1.0, 0.5, 0.5, 0.5, 0.5), cfg)
    doc = json.loads(text)
    assert doc["kind"] == "diagnostics"
    assert doc["homogeneity"]["is_homogeneous"] is False
    assert doc["positivity"]["violations"] == 0
    assert text == nf.run_diagnostics(nf.Parameters(1.0, 0.5, 0.5, 0.5, 0.5), cfg)


def test_csv_round_trip():
    truth = nf.Parameters(2.0, 0.8, 0.6, 0.4, 0.7)
    panel = nf.synth_panel(truth, 25, noise_sd=0.0, seed=5)
    text = nf.write_panel_csv(panel)
    back = nf.parse_panel_csv(text)
    assert len(back) == 25
    assert back.observations[0].K == panel.observations[0].K
    assert back.observations[0].V == panel.observations[0].V


def test_fit_round_trip():
    truth = nf.Parameters(2.0, 0.8, 0.6, 0.4, 0.7)
    panel = nf.synth_panel(truth, 60, noise_sd=0.0, seed=42)
    result = nf.fit(panel, n_starts=8, seed=7, user_starts=[truth])
    assert result.rss <= 1e-10
    assert result.converged
    assert result.best_start_index == 0
    assert result.params.A == pytest.approx(2.0, rel=1e-12)
    report = json.loads(nf.fit_report_json(result, "000", 7))
    assert report["kind"] == "fit"
    assert report["n_obs"] == 60
    assert report["converged"] is True


def test_in_process_cli():
    code, out, err = nf.run_cli(["eval", "--A", "3", "--sigma", "0.7", "--delta", "0.4",
                                 "--p", "0.5", "--q", "0.5", "--K", "1", "--L", "1"])
    assert code == 0
    assert out == "3\n"
    assert err == ""

    code, out, err = nf.run_cli(["eval", "--A", "1", "--sigma", "0.5", "--delta", "0.5",
                                 "--p", "0.5", "--q", "0.5", "--K", "0", "--L", "1"])
    assert code == 4
    assert "K" in err


@pytest.mark.skipif("NESTFN_CLI_PATH" not in os.environ, reason="CLI path not provided")
def test_installed_cli_binary():
    cli = os.environ["NESTFN_CLI_PATH"]
    proc = subprocess.run(
        [cli, "eval", "--A", "3", "--sigma", "0.7", "--delta", "0.4", "--p", "0.5", "--q", "0.5"],
        capture_output=True, text=True, check=True)
    assert proc.stdout == "3\n"
