import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from hermcurv import cli, models
from hermcurv import gauduchon as gd
from hermcurv.errors import ConfigError, ReportIOError
from hermcurv.report import Check, SweepTable, VerificationReport, emit_report, exit_code, render
from hermcurv.suites import SUITES, SuiteConfig, run_verification_suite

SCHEMA = json.loads(resources.files("hermcurv").joinpath("schema/report.schema.json").read_text())


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- report objects --------------------------------------------------------------------------


def test_check_evaluation():
    assert Check.evaluate("a", "", "", 1e-9, 1e-8).status == "pass"
    assert Check.evaluate("a", "", "", 1e-7, 1e-8).status == "fail"
    assert Check.evaluate("a", "", "", 0.5, 1e-4, ">=").status == "pass"
    assert Check.evaluate("a", "", "", float("nan"), 1.0).status == "fail"
    assert Check.evaluate("a", "", "", None, 1.0).status == "fail"


def test_report_status_and_ids():
    ok = Check.evaluate("b", "", "", 0.0, 1.0)
    bad = Check.evaluate("a", "", "", 2.0, 1.0)
    rep = VerificationReport({}, [ok, bad])
    assert rep.status == "fail" and exit_code(rep) == 1 and rep.failed == [bad]
    assert [c["id"] for c in rep.as_dict()["checks"]] == ["a", "b"]
    assert exit_code(VerificationReport({}, [ok])) == 0
    with pytest.raises(ConfigError):
        VerificationReport({}, [ok, ok])


def test_sweep_table_invariants():
    with pytest.raises(ConfigError):
        SweepTable("m", "scal", [0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ConfigError):
        SweepTable("m", "scal", [0.0, 1.0], [1.0])
    assert render(SweepTable("m", "scal", [], []), "csv") == "t,scal\n"


def test_report_json_matches_schema():
    rep = run_verification_suite(["lck", "liu-yang"], SuiteConfig(points=2))
    for stable in (True, False):
        jsonschema.validate(json.loads(render(rep, "json", stable)), SCHEMA)
    table = SweepTable("hopf", "scal", [0.0, 1.0], [1.0, 2.0], [[1.0], [2.0]])
    jsonschema.validate(json.loads(render(table, "json")), SCHEMA)


def test_csv_and_text_rendering():
    rep = VerificationReport({}, [Check.evaluate("x/y", "d", "anchor", 1e-3, 1e-8)])
    rows = list(csv.reader(io.StringIO(render(rep, "csv", stable=True))))
    assert rows[0] == ["id", "description", "anchor", "residual", "tolerance", "comparison", "status", "detail"]
    assert rows[1][0] == "x/y" and rows[1][6] == "fail"
    assert "[FAIL] x/y" in render(rep, "text")
    with pytest.raises(ConfigError):
        render(rep, "xml")


def test_emit_report_to_bad_destination(tmp_path):
    rep = VerificationReport({}, [])
    with pytest.raises(ReportIOError):
        emit_report(rep, "json", tmp_path / "missing" / "r.json")
    emit_report(rep, "json", tmp_path / "r.json")
    assert json.loads((tmp_path / "r.json").read_text())["status"] == "pass"


def test_config_validation():
    with pytest.raises(ConfigError):
        SuiteConfig(tol_scale=0)
    with pytest.raises(ConfigError):
        SuiteConfig(points=0)
    with pytest.raises(ConfigError):
        run_verification_suite("no-such-suite")


def test_suite_registry_kahler_passes():
    rep = run_verification_suite("kahler", SuiteConfig(points=3))
    assert rep.status == "pass"
    assert any("fubini_study" in c.id for c in rep.checks)


def test_parallel_run_matches_serial():
    a = run_verification_suite(["scalars", "lck"], SuiteConfig(points=2))
    b = run_verification_suite(["scalars", "lck"], SuiteConfig(points=2, workers=4))
    assert render(a, "json", stable=True) == render(b, "json", stable=True)


# -- sweep -------------------------------------------------------------------------------------


def test_sweep_flat_is_zero():
    flat = models.model("flat", n=2)
    pts = models.sample_points(models.ModelSpec("flat"), 2, 0)
    for q in cli.QUANTITIES:
        table = cli.sweep(flat, q, [-1.0, 0.0, 1.0], pts)
        assert table.values == [0.0, 0.0, 0.0]


def test_sweep_ricci_flat_only_at_its_t():
    spec = models.ModelSpec("hopf_lambda", n=2, lam=models.hopf_ricci_flat_lambda(0.0, 2))
    ts = cli.parse_range("-1:1:0.25")
    table = cli.sweep(models.builtin(spec), "ric1_norm", ts, models.sample_points(spec, 3, 0))
    for t, v in zip(table.grid, table.values):
        assert (v < 1e-12) == (t == 0.0), (t, v)


def test_sweep_torsion_norm_minimum_nearest_one_third():
    ts = cli.parse_range("-1:2:0.1")
    table = cli.sweep(models.builtin(models.ModelSpec("hopf")), "torsion_norm", ts,
                      models.sample_points(models.ModelSpec("hopf"), 2, 0))
    vals = np.array(table.values)
    assert np.all(np.diff(vals, 2) > 0)
    assert table.grid[int(vals.argmin())] == pytest.approx(0.3)


def test_parse_helpers():
    assert cli.parse_range("0:1:0.5") == [0.0, 0.5, 1.0]
    assert cli.parse_t("1/3") == pytest.approx(1 / 3)
    assert cli.parse_t("bismut") == -1.0
    assert np.allclose(cli.parse_point("1+2j, -0.5i"), [1 + 2j, -0.5j])
    for bad in ("1:0:0.1", "0:1:0", "0:1", "a:b:c"):
        with pytest.raises(ConfigError):
            cli.parse_range(bad)
    with pytest.raises(ConfigError):
        cli.parse_point("1,,2")
    with pytest.raises(ConfigError):
        cli.parse_t("inf")


# -- CLI ---------------------------------------------------------------------------------------


def test_verify_is_deterministic(capsys):
    argv = ["verify", "--suite", "scalars", "hsc", "--points", "2", "--seed", "3", "--stable-output"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    data = json.loads(out1)
    assert "created" not in data and all("seconds" not in c for c in data["checks"])
    jsonschema.validate(data, SCHEMA)


def test_verify_failure_exit_code(capsys, monkeypatch):
    real = gd.curvature_closed_form
    monkeypatch.setattr(
        gd, "curvature_closed_form",
        lambda t, pkg: gd.GauduchonCurvature(t, real(t, pkg).R11, real(t, pkg).R20 + 1.0, pkg.g, pkg.frame, "bad"),
    )
    code, out, _ = run(["verify", "--suite", "dual-route", "--points", "1", "--format", "text"], capsys)
    assert code == 1
    assert "[FAIL] dual-route/hopf-n2" in out


def test_tolerance_scale_is_applied(capsys):
    code, out, _ = run(["verify", "--suite", "lck", "--tol", "1e-12", "--stable-output"], capsys)
    assert code == 1
    assert json.loads(out)["checks"][0]["tolerance"] == pytest.approx(1e-19)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["verify", "--suite", "nope"],
        ["verify", "--tol", "0"],
        ["verify", "--points", "0"],
        ["curvature", "--model", "hopf", "--point", "0,0", "--t", "0"],
        ["curvature", "--model", "hopf", "--point", "1", "--t", "0"],
        ["curvature", "--model", "hopf", "--point", "1,1", "--t", "x"],
        ["curvature", "--model", "hopf", "--point", "1,1", "--t", "0", "--order", "1"],
        ["curvature", "--model", "iwasawa", "--n", "2", "--point", "1,1", "--t", "0"],
        ["curvature", "--metric-file", "/does/not/exist", "--point", "1,1", "--t", "0"],
        ["curvature", "--point", "1,1", "--t", "0"],
        ["sweep", "--model", "hopf", "--quantity", "scal", "--t-range", "1:0:0.1"],
        ["sweep", "--model", "hopf", "--quantity", "volume", "--t-range", "0:1:0.5"],
        ["lambda-star", "--t", "1", "--n", "2"],
        ["lambda-star", "--t", "0", "--n", "1"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err


def test_lambda_star(capsys):
    code, out, _ = run(["lambda-star", "--t", "-1", "--n", "3"], capsys)
    assert code == 0 and float(out) == pytest.approx(1 / 3)
    code, out, _ = run(["lambda-star", "--t", "1/3", "--n", "2", "--format", "json"], capsys)
    assert json.loads(out)["lambda_star"] == pytest.approx((1 / 3 * -1 - 1) / 2)


def test_curvature_command(capsys, tmp_path):
    code, out, _ = run(["curvature", "--model", "hopf_lambda", "--lambda", "-0.5", "--point", "1,0.5i",
                        "--t", "0"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["n"] == 2 and len(d["ricci"]["ric1"]) == 2
    # lambda = -1/2 is lambda*(0) for n = 2
    assert np.max(np.abs(np.array(d["ricci"]["ric1"]))) < 1e-12
    src = tmp_path / "fs.metric"
    src.write_text(models.fubini_study_source(2))
    code, out, _ = run(["curvature", "--metric-file", str(src), "--point", "0.2,0.1", "--t", "minimal",
                        "--format", "text"], capsys)
    assert code == 0 and "Kaehler at this point: yes" in out


def test_sweep_command(capsys, tmp_path):
    target = tmp_path / "sweep.csv"
    code, _, _ = run(["sweep", "--model", "hopf", "--quantity", "torsion_norm", "--t-range", "-1:1:0.5",
                      "--points", "2", "--output", str(target)], capsys)
    assert code == 0
    rows = list(csv.reader(target.open()))
    assert rows[0] == ["t", "torsion_norm", "point_0", "point_1"] and len(rows) == 6
    code, out, _ = run(["sweep", "--model", "fubini_study", "--quantity", "hsc_max", "--t-range", "0:1:1",
                        "--point", "0.1,0.2", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["values"] == pytest.approx([2.0, 2.0])


def test_console_script_exit_codes():
    ok = subprocess.run([sys.executable, "-m", "hermcurv.cli", "verify", "--suite", "lck"], capture_output=True)
    assert ok.returncode == 0
    bad = subprocess.run([sys.executable, "-m", "hermcurv.cli", "verify", "--suite", "zzz"], capture_output=True)
    assert bad.returncode == 2


def test_every_registered_suite_runs():
    rep = run_verification_suite(list(SUITES), SuiteConfig(points=2, workers=4))
    assert rep.status == "pass", [(c.id, c.residual, c.detail) for c in rep.failed]
