import json

import numpy as np
import pytest

from finslerab import cli, testmetrics
from finslerab.classify import RunConfig, emit_report, run_appendix, run_check


def small_config(**over):
    base = dict(points=4, y_per_point=3, seed=0, tolerance=1e-7)
    base.update(over)
    return RunConfig(**base)


def test_check_example_verdicts(example_spec):
    report = run_check(example_spec, small_config())
    v = {k: c.verdict for k, c in report.conditions.items()}
    assert v["beta_parallel"] and v["beta_constant_killing"] and v["beta_killing"]
    assert v["alpha_ricci_flat"] and v["F_ricci_flat"] and v["F_einstein"]
    assert v["S_zero"]
    # alpha is Ricci-flat but curved: no constant flag curvature
    assert not v["constant_flag_curvature"]
    assert not report.engine_inconsistent
    assert abs(report.conditions["F_einstein"].value) <= 1e-8


def test_check_trivial_euclidean():
    report = run_check(testmetrics.euclidean(3), small_config())
    v = {k: c.verdict for k, c in report.conditions.items()}
    assert all(
        v[k]
        for k in (
            "beta_killing", "beta_closed", "beta_constant_killing", "beta_parallel",
            "beta_conformal", "beta_norm_constant", "alpha_einstein",
            "alpha_ricci_flat", "F_einstein", "F_ricci_flat", "S_zero",
            "constant_flag_curvature",
        )
    )
    for k in ("beta_conformal", "alpha_einstein", "F_einstein", "constant_flag_curvature"):
        assert abs(report.conditions[k].value) <= 1e-12
    assert not report.engine_inconsistent


def test_check_negative_control(homothetic_spec):
    report = run_check(homothetic_spec, small_config(points=6, y_per_point=4))
    c = report.conditions
    assert c["beta_conformal"].verdict
    assert abs(c["beta_conformal"].value - 0.1) <= 1e-9
    assert not c["F_einstein"].verdict
    assert not c["beta_killing"].verdict
    assert not c["S_zero"].verdict
    assert not report.engine_inconsistent


def test_check_rotational_killing(rotational_spec):
    report = run_check(rotational_spec, small_config())
    c = report.conditions
    assert c["beta_killing"].verdict
    assert not c["beta_closed"].verdict
    assert not c["beta_constant_killing"].verdict  # s_i != 0 despite Killing
    assert not c["S_zero"].verdict
    assert not report.engine_inconsistent


def test_report_formats(example_spec):
    report = run_check(example_spec, small_config(points=2, y_per_point=2))
    text = emit_report(report, "text")
    assert "beta_parallel" in text and "yes" in text

    payload = json.loads(emit_report(report, "json"))
    assert set(payload) == {"metric", "config", "conditions", "points", "consistency"}
    cond = payload["conditions"]["F_ricci_flat"]
    assert cond["verdict"] is True and cond["residual"] <= 1e-8
    assert "value" in payload["conditions"]["F_einstein"]

    csv_text = emit_report(report, "csv")
    rows = [r for r in csv_text.strip().splitlines()[1:] if r]
    assert len(rows) == 2 * 2  # points x y-per-point


def test_json_determinism(example_spec):
    a = emit_report(run_check(example_spec, small_config()), "json")
    b = emit_report(run_check(example_spec, small_config()), "json")
    assert a == b


def test_appendix_report(generic3d):
    rep = run_appendix(generic3d, small_config(points=6, sigma_policy="random"))
    assert rep.ok
    assert rep.max_rel_dev <= 1e-6
    assert rep.max_parity_dev <= 1e-6
    assert len(rep.samples) == 6


# -- CLI ------------------------------------------------------------------------


def _example_path():
    return str(testmetrics.shipped_metric_path("matsumoto_example"))


def test_cli_check_exit_ok(capsys):
    code = cli.main(["check", _example_path(), "--points", "2", "--y-per-point", "2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "beta_parallel" in out


def test_cli_validate_bad_metric(tmp_path, capsys):
    bad = tmp_path / "bad.metric"
    bad.write_text("dim = 2\na 1 1 = 1\na 2 2 = 1\nb 1 = 0.51\n")
    assert cli.main(["validate", str(bad)]) == cli.EXIT_INVALID_METRIC
    good = tmp_path / "good.metric"
    good.write_text("dim = 2\na 1 1 = 1\na 2 2 = 1\nb 1 = 0.2\n")
    assert cli.main(["validate", str(good)]) == 0


def test_cli_check_rejects_invalid(tmp_path, capsys):
    bad = tmp_path / "syntax.metric"
    bad.write_text("dim = 2\na 1 1 = x9\n")
    assert cli.main(["check", str(bad)]) == cli.EXIT_INVALID_METRIC


def test_cli_engine_inconsistency_exit(monkeypatch, capsys, example_spec):
    real = run_check

    def sabotaged(spec, config):
        report = real(spec, config)
        report.consistency["violations"].append("synthetic violation for exit-code test")
        return report

    monkeypatch.setattr(cli.classify, "run_check", sabotaged)
    code = cli.main(["check", _example_path(), "--points", "2", "--y-per-point", "2"])
    assert code == cli.EXIT_INCONSISTENT


def test_cli_appendix_and_sweep(capsys):
    assert cli.main(["appendix", _example_path(), "--sigma", "0", "--points", "3"]) == 0
    out = capsys.readouterr().out
    assert "identity holds" in out
    assert cli.main(["appendix", "--dim-sweep", "3", "--points", "3"]) == 0
    out = capsys.readouterr().out
    assert "sweep worst relative deviation" in out


def test_cli_scurv_and_flag(capsys):
    assert cli.main(["scurv", _example_path(), "--points", "3"]) == 0
    out = capsys.readouterr().out
    assert "constant Killing form: yes" in out
    flat = str(testmetrics.shipped_metric_path("euclidean_flat"))
    assert cli.main(["flag", flat, "--points", "3"]) == 0
    out = capsys.readouterr().out
    assert "constant flag curvature: yes" in out


def test_cli_out_file(tmp_path):
    out = tmp_path / "report.json"
    code = cli.main(
        ["check", _example_path(), "--points", "2", "--y-per-point", "2",
         "--format", "json", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["metric"] == "matsumoto_example"
