import csv
import json
import math
import subprocess
import sys

import pytest

from phaseqsl import cli


def run_csv(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    rc = cli.main([*argv, "--out", str(out)])
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# phaseqsl ")
    return rc, json.loads(lines[0][len("# phaseqsl "):]), list(csv.DictReader(lines[1:])), text


@pytest.fixture(scope="module")
def cv_rows(tmp_path_factory):
    return run_csv(tmp_path_factory.mktemp("cv"), "cv-sweep")


def test_cv_sweep_table(cv_rows):
    rc, cfg, rows, _ = cv_rows
    assert rc == 0
    assert cfg["s_steps"] == 201 and cfg["seed"] == 0
    assert len(rows) == 202
    s0 = [r for r in rows if r["mark"].startswith("s0")][0]
    assert float(s0["s"]) == 0.0
    assert float(s0["V_closed_form"]) == pytest.approx(math.sqrt(2), abs=1e-6)
    opt = [r for r in rows if r["mark"] == "optimum"][0]
    assert float(opt["s"]) == pytest.approx(-1 / 3, abs=0.01)
    assert float(opt["V_closed_form"]) == pytest.approx(1.299038, abs=1e-6)
    assert float(opt["V_numeric"]) == pytest.approx(1.299038, abs=1e-4)
    assert all(r["branches_equal"] == "true" for r in rows)
    assert max(abs(float(r["V_numeric"]) - float(r["V_closed_form"])) for r in rows) <= 1e-4


def test_cv_sweep_twelve_significant_digits(cv_rows):
    rows = cv_rows[2]
    mantissa = rows[0]["V_closed_form"].replace(".", "").lstrip("0")
    assert len(mantissa) <= 12


@pytest.mark.parametrize("argv", [["cv-sweep", "--s-min", "-1.2"], ["cv-sweep", "--s-max", "1"], ["cv-sweep", "--s-min", "0.5", "--s-max", "0.1"],
                                  ["cv-sweep", "--s-steps", "1"], ["qubit-sweep", "--x", "pie"], ["verify", "--bogus"], ["tau", "--tau", "-1"],
                                  ["qubit-sweep", "--hbar", "0"]])
def test_usage_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_parse_number():
    assert cli.parse_number("pi/4") == pytest.approx(math.pi / 4)
    assert cli.parse_number("3*pi/16") == pytest.approx(3 * math.pi / 16)
    assert cli.parse_number("-0.25") == -0.25
    for bad in ("__import__('os')", "pi**2", "1/0"):
        with pytest.raises(Exception):
            cli.parse_number(bad)


def test_qubit_sweep_examples(tmp_path):
    rc, cfg, rows, _ = run_csv(tmp_path, "qubit-sweep", "--x", "pi/16", "pi/8", "pi/4", "--s-min", "-6", "--s-max", "2", "--s-steps", "81")
    assert rc == 0
    pick = lambda x, s: [r for r in rows if abs(float(r["x"]) - x) < 1e-9 and r["s"] == s][0]
    assert float(pick(math.pi / 4, "0")["V_closed_form"]) == pytest.approx(0.707107, abs=1e-6)
    assert float(pick(math.pi / 16, "-inf")["V_closed_form"]) == pytest.approx(0.5 * math.sin(math.pi / 8), abs=1e-10)
    assert float(pick(math.pi / 8, "-1")["V_closed_form"]) == pytest.approx(0.5 * math.sqrt(4 / 3) * math.sin(math.pi / 4), abs=1e-10)
    assert float(pick(math.pi / 4, "0")["V_hilbert_s0"]) == pytest.approx(1 / math.sqrt(2), abs=1e-10)
    assert len(rows) == 3 * 82


def test_outputs_are_byte_identical(tmp_path):
    a = run_csv(tmp_path, "qubit-sweep", "--x", "pi/8", name="a.csv")[3]
    b = run_csv(tmp_path, "qubit-sweep", "--x", "pi/8", name="b.csv")[3]
    assert a == b


def test_env_seed_override(tmp_path, monkeypatch):
    monkeypatch.setenv("QSL_SEED", "17")
    _, cfg, _, _ = run_csv(tmp_path, "tau", "--seed", "3")
    assert cfg["seed"] == 17
    monkeypatch.setenv("QSL_SEED", "x")
    assert cli.main(["tau"]) == 2


def test_tau_examples(tmp_path):
    _, _, rows, _ = run_csv(tmp_path, "tau", "--system", "qubit", "--x", "pi/4", "--tau", "pi", "--s", "0")
    assert float(rows[0]["tau_qsl"]) == pytest.approx(math.sqrt(2), abs=1e-8)
    _, _, rows, _ = run_csv(tmp_path, "tau", "--system", "coherent", "--omega-alpha", "1", "--tau", "pi")
    assert float(rows[0]["tau_qsl"]) == pytest.approx((1 - math.exp(-4)) / math.sqrt(2), abs=1e-6)
    for key in ("tau", "P_tau", "mean_V", "ratio"):
        assert key in rows[0]


def test_tau_stationary_flagged(tmp_path):
    _, _, rows, _ = run_csv(tmp_path, "tau", "--x", "0")
    assert rows[0]["flagged"] == "true"
    assert float(rows[0]["tau_qsl"]) == 0.0


def test_json_sweep_format(tmp_path):
    out = tmp_path / "t.json"
    assert cli.main(["tau", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"config", "residuals", "pass"}
    assert doc["pass"] is True


def test_validator_flags_bad_rows():
    cfg = cli.RunConfig("cv-sweep", s_min=-0.99, s_max=0.99, s_steps=201)
    cols, rows = cli.cmd_cv_sweep(cfg)
    assert cli.validate_cv_rows(cfg, rows) == []
    rows[5]["V_numeric"] += 1e-3
    assert any("quadrature" in e for e in cli.validate_cv_rows(cfg, rows))
    qcfg = cli.RunConfig("qubit-sweep", x=[0.3], s_min=-1, s_max=1, s_steps=5)
    _, qrows = cli.cmd_qubit_sweep(qcfg)
    assert cli.validate_qubit_rows(qcfg, qrows) == []
    qrows[0]["V_closed_form"] *= 1.1
    assert cli.validate_qubit_rows(qcfg, qrows)


@pytest.fixture(scope="module")
def verify_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify") / "v.json"
    rc = cli.main(["verify", "--out", str(out)])
    return rc, json.loads(out.read_text())


def test_verify_default_passes(verify_report):
    rc, doc = verify_report
    assert rc == 0 and doc["pass"] is True
    assert set(doc) == {"config", "residuals", "pass"}
    for key in ("sw", "bound_validity", "corollary", "hilbert_equivalence", "discrete_agreement"):
        assert doc["residuals"][key]["pass"] is True


def test_verify_report_has_all_five_criteria_per_space(verify_report):
    spaces = verify_report[1]["residuals"]["sw"]["spaces"]
    assert {k.split("[")[0] for k in spaces} == {"cv", "su2", "su3", "discrete"}
    for rep in spaces.values():
        assert set(rep) == {"SW-1", "SW-2", "SW-3", "SW-4", "SW-5"}


def test_verify_corrupted_kernel_names_sw2(tmp_path, capsys):
    out = tmp_path / "bad.json"
    assert cli.main(["verify", "--corrupt-kernel", "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "SW-2" in err
    doc = json.loads(out.read_text())
    assert doc["pass"] is False
    assert any(f.endswith("SW-2") for f in doc["residuals"]["failures"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "phaseqsl", "tau", "--system", "coherent"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[1].startswith("tau,P_tau")
