"""Acceptance criteria 1-10, each at its stated tolerance.

Every criterion records one PASS/FAIL line, printed at the end of the pytest
run (and directly when this file is executed as a script).
"""

import csv
import json
import math
import time

import pytest

from phaseqsl import cli, suites

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


def read_table(path):
    lines = path.read_text().splitlines()
    return list(csv.DictReader(lines[1:]))


def test_criterion_01_cv_optimum(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "cv.csv"
    rc = cli.main(["cv-sweep", "--omega-alpha", "1", "--s-min", "-0.99", "--s-max", "0.99", "--s-steps", "201", "--out", str(out)])
    dt = time.perf_counter() - t0
    rows = read_table(out)
    grid = [r for r in rows if r["mark"] != "optimum"]
    opt = [r for r in rows if r["mark"] == "optimum"][0]
    gmin = min(grid, key=lambda r: float(r["V_closed_form"]))
    s0 = [r for r in grid if float(r["s"]) == 0.0][0]
    target = 3 * math.sqrt(3) / 4
    e_cf = abs(float(opt["V_closed_form"]) - target)
    e_q = abs(float(opt["V_numeric"]) - target)
    e_s = abs(float(opt["s"]) + 1 / 3)
    e_gs = abs(float(gmin["s"]) + 1 / 3)
    e_0 = abs(float(s0["V_closed_form"]) - math.sqrt(2))
    ok = rc == 0 and len(grid) == 201 and e_s <= 0.01 and e_gs <= 0.01 and e_cf <= 1e-6 and e_q <= 1e-4 and e_0 <= 1e-6 and dt <= 60
    record(1, ok, f"s*={float(opt['s']):.6f} |dV|cf={e_cf:.1e} |dV|quad={e_q:.1e} |V0-sqrt2|={e_0:.1e} {dt:.1f}s")


def test_criterion_02_qubit_curves(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "q.csv"
    rc = cli.main(["qubit-sweep", "--x", "pi/16", "pi/8", "pi/4", "--s-min", "-6", "--s-max", "2", "--s-steps", "81", "--out", str(out)])
    dt = time.perf_counter() - t0
    rows = read_table(out)
    worst = worst_asym = 0.0
    v0 = None
    for r in rows:
        x, s, V = float(r["x"]), float(r["s"]), float(r["V_closed_form"])
        amp = abs(math.sin(2 * x))
        if math.isinf(s):
            worst_asym = max(worst_asym, abs(V - 0.5 * amp))
        else:
            worst = max(worst, abs(V - 0.5 * math.sqrt(1 + 3**s) * amp))
            if s == 0 and abs(x - math.pi / 4) < 1e-12:
                v0 = V
    e_v0 = abs(v0 - 0.707107)
    ok = rc == 0 and worst <= 1e-10 and worst_asym <= 1e-10 and e_v0 <= 1e-6 and abs(v0 - 1 / math.sqrt(2)) <= 1e-10 and dt <= 5
    record(2, ok, f"curve residual {worst:.1e}, asymptote {worst_asym:.1e}, V0(pi/4)={v0:.10f}, {dt:.2f}s")


def test_criterion_03_corollary():
    r = suites.corollary_suite(n=100)
    record(3, r["pass"] and r["max_residual"] <= 1e-12, f"max |v0^2 - v^-s v^s| = {r['max_residual']:.1e} over {r['instances']}")


def test_criterion_04_hilbert_equivalence():
    r = suites.hilbert_equivalence_suite(n=100)
    record(4, r["pass"] and r["max_residual"] <= 1e-10, f"max |V0 - Hilbert bound| = {r['max_residual']:.1e} over {r['instances']}")


def test_criterion_05_bound_validity():
    r = suites.bound_validity_suite(n=200, s_values=(-2.0, -1.0, 0.0, 1.0), n_times=100)
    ok = r["max_violation"] <= 1e-10 and r["max_tau_excess"] <= 0.0
    record(5, ok, f"max(|Pdot|-V) = {r['max_violation']:.3e}, max(tau_QSL-tau) = {r['max_tau_excess']:.3e}, {r['runs']} runs")


def test_criterion_06_sw_criteria(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "v.json"
    rc = cli.main(["verify", "--out", str(out)])
    dt = time.perf_counter() - t0
    spaces = json.loads(out.read_text())["residuals"]["sw"]["spaces"]

    def worst(prefix, key="residual"):
        return max(v.get(key, 0.0) or 0.0 for k, rep in spaces.items() if k.startswith(prefix) for v in rep.values())

    cv_r, su2_r, disc_r = worst("cv["), worst("su2["), worst("discrete[")
    su3_z = worst("su3[", "z")
    all_five = all(set(rep) == {f"SW-{i}" for i in range(1, 6)} for rep in spaces.values())
    ok = rc == 0 and all_five and cv_r <= 1e-4 and su2_r <= 1e-7 and su3_z <= 5 and disc_r <= 1e-12 and dt <= 600
    record(6, ok, f"cv {cv_r:.1e}, su2 {su2_r:.1e}, su3 max z {su3_z:.2f}, discrete {disc_r:.1e}, {dt:.1f}s")


def test_criterion_07_discrete_agreement():
    r = suites.discrete_agreement_suite(n=100)
    res = max(r["max_chi_residual"], r["max_v_residual"])
    record(7, res <= 1e-10, f"max residual {res:.1e} over {r['instances']} triples")


def test_criterion_08_moyal_bracket():
    t0 = time.perf_counter()
    r = suites.moyal_suite(nodes=(32, 64), n_points=8, s=0.0)
    dt = time.perf_counter() - t0
    record(8, r["max_relative_error"] <= 0.01 and dt <= 300, f"max relative error {r['max_relative_error']:.1e} at 8 points, {dt:.2f}s")


def test_criterion_09_ratio():
    r = suites.ratio_suite()
    ok = r["max_residual"] <= 1e-12 and abs(r["reduction_percent_N2"] - 29.2893) <= 1e-4
    record(9, ok, f"ratio residual {r['max_residual']:.1e}, N=2 reduction {r['reduction_percent_N2']:.6f}%")


def test_criterion_10_tau_examples(tmp_path):
    vals = {}
    for system, extra in (("qubit", ["--x", "pi/4"]), ("coherent", ["--omega-alpha", "1"])):
        out = tmp_path / f"{system}.csv"
        rc = cli.main(["tau", "--system", system, *extra, "--tau", "pi", "--s", "0", "--out", str(out)])
        assert rc == 0
        vals[system] = float(read_table(out)[0]["tau_qsl"])
    e_q = abs(vals["qubit"] - math.sqrt(2))
    e_c = abs(vals["coherent"] - (1 - math.exp(-4)) / math.sqrt(2))
    record(10, e_q <= 1e-8 and e_c <= 1e-6, f"qubit {vals['qubit']:.12f} (err {e_q:.1e}), coherent {vals['coherent']:.12f} (err {e_c:.1e})")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
