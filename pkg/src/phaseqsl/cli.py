"""Command-line front end: bound sweeps, verification suites and QSL times.

Exit codes: 0 success, 1 a check failed, 2 bad usage or invalid parameters.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from . import cv, suites
from .dynamics import EvolutionSpec, rho_dot
from .exceptions import PhaseSpaceError
from .qsl import CoherentSystem, hilbert_bound, qsl_report_coherent, qsl_report_sun, tightest_s
from .sun_algebra import build_basis, decompose
from .sun_phase_space import V_qsl_sun, build_measure, chi_sun_numeric, symbol_on_measure

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    N: int = 2
    x: list = field(default_factory=lambda: [math.pi / 16, math.pi / 8, math.pi / 4])
    omega_alpha: float = 1.0
    hbar: float = 1.0
    s_min: float | None = None
    s_max: float | None = None
    s_steps: int | None = None
    s: float = 0.0
    system: str = "qubit"
    tau: float = math.pi
    time_steps: int = 101
    measure_nodes: tuple = (16, 32)
    mc_samples: int = 100_000
    seed: int = 0
    corrupt_kernel: bool = False
    out: str | None = None
    format: str = "csv"

    def s_grid(self) -> np.ndarray:
        s = np.linspace(self.s_min, self.s_max, self.s_steps)
        s[np.abs(s) < 1e-12] = 0.0
        return s

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d["measure_nodes"] = list(self.measure_nodes)
        return d


_DEFAULT_S = {"cv-sweep": (-0.99, 0.99, 201), "qubit-sweep": (-6.0, 2.0, 81)}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Float or simple arithmetic in ``pi`` such as ``3*pi/16``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(text)

    try:
        value = ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def parse_nodes(text: str) -> tuple:
    parts = text.lower().split("x")
    try:
        nodes = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NTHETAxNPHI, got {text!r}")
    if len(nodes) == 1:
        nodes = (nodes[0], 2 * nodes[0])
    if len(nodes) != 2 or min(nodes) < 2:
        raise argparse.ArgumentTypeError(f"expected NTHETAxNPHI with both >= 2, got {text!r}")
    return nodes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phaseqsl", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--hbar", type=parse_number, default=1.0)

    def s_range(sp):
        sp.add_argument("--s-min", type=parse_number, default=None)
        sp.add_argument("--s-max", type=parse_number, default=None)
        sp.add_argument("--s-steps", type=int, default=None)

    sp = sub.add_parser("cv-sweep", help="coherent-state bound against s")
    s_range(sp)
    sp.add_argument("--omega-alpha", type=parse_number, default=1.0)
    common(sp, "csv")

    sp = sub.add_parser("qubit-sweep", help="qubit bound against s for several x")
    s_range(sp)
    sp.add_argument("--x", type=parse_number, nargs="+", default=None)
    sp.add_argument("--measure-nodes", type=parse_nodes, default=(16, 32))
    common(sp, "csv")

    sp = sub.add_parser("verify", help="run every verification suite")
    sp.add_argument("--measure-nodes", type=parse_nodes, default=(16, 32))
    sp.add_argument("--mc-samples", type=int, default=100_000)
    sp.add_argument("--corrupt-kernel", action="store_true", help=argparse.SUPPRESS)
    common(sp, "json")

    sp = sub.add_parser("tau", help="QSL time for a qubit or coherent state")
    sp.add_argument("--system", choices=("qubit", "coherent"), default="qubit")
    sp.add_argument("--x", type=parse_number, nargs=1, default=[math.pi / 4])
    sp.add_argument("--omega-alpha", type=parse_number, default=1.0)
    sp.add_argument("--s", type=parse_number, default=0.0)
    sp.add_argument("--tau", type=parse_number, default=math.pi)
    sp.add_argument("--time-steps", type=int, default=101)
    common(sp, "csv")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(args).items() if v is not None}
    env = os.environ.get("QSL_SEED")
    if env is not None:
        try:
            kw["seed"] = int(env)
        except ValueError:
            raise UsageError(f"QSL_SEED must be an integer, got {env!r}")
    cfg = RunConfig(**kw)
    if cfg.command in _DEFAULT_S:
        lo, hi, n = _DEFAULT_S[cfg.command]
        cfg.s_min = lo if cfg.s_min is None else cfg.s_min
        cfg.s_max = hi if cfg.s_max is None else cfg.s_max
        cfg.s_steps = n if cfg.s_steps is None else cfg.s_steps
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.hbar <= 0:
        raise UsageError("--hbar must be positive")
    if cfg.command in _DEFAULT_S:
        if cfg.s_steps < 2:
            raise UsageError("--s-steps must be at least 2")
        if not cfg.s_min < cfg.s_max:
            raise UsageError("--s-min must be below --s-max")
    if cfg.command == "cv-sweep" and not (-1 < cfg.s_min and cfg.s_max < 1):
        raise UsageError("the coherent-state sweep needs s inside (-1, 1)")
    if cfg.command in ("cv-sweep", "tau") and cfg.omega_alpha < 0:
        raise UsageError("--omega-alpha must be non-negative")
    if cfg.command == "tau":
        if cfg.tau <= 0:
            raise UsageError("--tau must be positive")
        if cfg.time_steps < 2:
            raise UsageError("--time-steps must be at least 2")
        if cfg.system == "coherent" and not -1 < cfg.s < 1:
            raise UsageError("the coherent-state bound needs s inside (-1, 1)")
    if cfg.command == "verify" and cfg.mc_samples < 1000:
        raise UsageError("--mc-samples must be at least 1000")


# ---------------------------------------------------------------- sweeps


def cmd_cv_sweep(cfg: RunConfig):
    oa = cfg.omega_alpha
    grid = cfg.s_grid()
    t_half = 0.5 * math.pi
    rows = []
    for s in grid:
        closed = cv.V_qsl_cv(oa, s)
        chi0 = cv.chi_cv_numeric(oa, -s)
        chit = cv.chi_cv_numeric(oa * np.exp(-1j * t_half), -s)
        v0 = cv.v_qsl_cv_numeric(oa, s)
        vt = cv.v_qsl_cv_numeric(oa, s, t_half)
        b0, b1 = chit * v0, chi0 * vt
        rows.append({"s": s, "V_closed_form": closed, "V_numeric": min(b0, b1),
                     "branches_equal": abs(b0 - b1) <= 1e-8 * max(b0, 1.0), "mark": ""})
    i0 = int(np.argmin(np.abs(grid)))
    if grid[i0] == 0.0:
        rows[i0]["mark"] = "s0"
    imin = int(np.argmin([r["V_closed_form"] for r in rows]))
    rows[imin]["mark"] = (rows[imin]["mark"] + "+grid_min").lstrip("+")
    s_star = cv.optimal_s_cv(cfg.s_min, cfg.s_max)
    num = tightest_s(CoherentSystem(oa), (cfg.s_min, cfg.s_max), mode="numeric")
    rows.append({"s": s_star, "V_closed_form": cv.V_qsl_cv(oa, s_star), "V_numeric": num.V,
                 "branches_equal": True, "mark": "optimum"})
    return ["s", "V_closed_form", "V_numeric", "branches_equal", "mark"], rows


def _qubit_state(x: float) -> np.ndarray:
    psi = np.array([math.cos(x), math.sin(x)])
    return np.outer(psi, psi).astype(complex)


def cmd_qubit_sweep(cfg: RunConfig):
    basis = build_basis(2)
    m = build_measure(2, resolution=tuple(cfg.measure_nodes), basis=basis)
    H = 0.5 * np.diag([1.0, -1.0]).astype(complex)
    h = decompose(H, basis).vector
    rows = []
    for x in cfg.x:
        rho = _qubit_state(x)
        spec = EvolutionSpec(H, rho, hbar=cfg.hbar)
        b = decompose(rho, basis).vector
        hil = hilbert_bound(spec, 0.0)
        rd = rho_dot(spec, rho)
        for s in cfg.s_grid():
            closed = V_qsl_sun(h, b, b, s, 2, basis, cfg.hbar)[0]
            Fd = symbol_on_measure(rd, m.R, s, basis).real
            numeric = chi_sun_numeric(rho, -s, m, basis) * math.sqrt(float(m.integrate(Fd * Fd)))
            rows.append({"x": x, "s": s, "V_closed_form": closed, "V_numeric": numeric, "V_hilbert_s0": hil})
        rows.append({"x": x, "s": -math.inf, "V_closed_form": V_qsl_sun(h, b, b, -math.inf, 2, basis, cfg.hbar)[0],
                     "V_numeric": math.nan, "V_hilbert_s0": hil})
    return ["x", "s", "V_closed_form", "V_numeric", "V_hilbert_s0"], rows


def validate_cv_rows(cfg: RunConfig, rows) -> list[str]:
    errs = []
    for r in rows:
        if not r["V_closed_form"] >= 0:
            errs.append(f"negative bound at s={r['s']}")
        if abs(r["V_numeric"] - r["V_closed_form"]) > 1e-4:
            errs.append(f"quadrature disagrees at s={r['s']}")
        if not r["branches_equal"]:
            errs.append(f"branches differ at s={r['s']}")
        if r["mark"].startswith("s0") and abs(r["V_closed_form"] - math.sqrt(2) * cfg.omega_alpha) > 1e-6:
            errs.append("s=0 row differs from sqrt(2) w|a0|")
    opt = [r for r in rows if r["mark"] == "optimum"][0]
    gmin = [r for r in rows if "grid_min" in r["mark"]][0]
    step = (cfg.s_max - cfg.s_min) / (cfg.s_steps - 1)
    if abs(opt["s"] - gmin["s"]) > step:
        errs.append("grid minimum and refined optimum are more than a step apart")
    if opt["V_closed_form"] > gmin["V_closed_form"] + 1e-12:
        errs.append("refined optimum is above the grid minimum")
    return errs


def validate_qubit_rows(cfg: RunConfig, rows) -> list[str]:
    errs = []
    for r in rows:
        amp = abs(math.sin(2 * r["x"])) / cfg.hbar
        expect = 0.5 * amp if r["s"] == -math.inf else 0.5 * math.sqrt(1 + 3.0 ** r["s"]) * amp
        if abs(r["V_closed_form"] - expect) > 1e-10:
            errs.append(f"closed form off at x={r['x']}, s={r['s']}")
        if math.isfinite(r["s"]) and abs(r["V_numeric"] - r["V_closed_form"]) > 1e-8 * max(1.0, expect):
            errs.append(f"measure quadrature off at x={r['x']}, s={r['s']}")
        if r["s"] == 0.0 and abs(r["V_hilbert_s0"] - r["V_closed_form"]) > 1e-10:
            errs.append(f"s=0 bound differs from the Hilbert-space bound at x={r['x']}")
    return errs


# ---------------------------------------------------------------- verify and tau


def cmd_verify(cfg: RunConfig):
    sd = cfg.seed
    residuals = {
        "sw": suites.sw_suite(cfg.mc_samples, seed=sd, sphere=tuple(cfg.measure_nodes), corrupt=cfg.corrupt_kernel),
        "bound_validity": suites.bound_validity_suite(seed=23 + sd),
        "corollary": suites.corollary_suite(seed=11 + sd),
        "hilbert_equivalence": suites.hilbert_equivalence_suite(seed=11 + sd),
        "discrete_agreement": suites.discrete_agreement_suite(seed=31 + sd),
        "moyal": suites.moyal_suite(seed=41 + sd),
        "ratio": suites.ratio_suite(seed=51 + sd),
        "tau_examples": suites.tau_examples(),
    }
    failures = list(residuals["sw"]["failures"])
    failures += [name for name, rep in residuals.items() if name != "sw" and not rep["pass"]]
    return residuals, failures


def cmd_tau(cfg: RunConfig):
    times = np.linspace(0.0, cfg.tau, cfg.time_steps)
    if cfg.system == "qubit":
        H = 0.5 * np.diag([1.0, -1.0]).astype(complex)
        rep = qsl_report_sun(EvolutionSpec(H, _qubit_state(cfg.x[0]), hbar=cfg.hbar, times=times), cfg.s)
    else:
        rep = qsl_report_coherent(1.0, cfg.omega_alpha, cfg.s, times)
    mean_V = float(trapezoid(rep.V, times) / cfg.tau)
    row = {"tau": rep.tau, "P_tau": float(rep.P[-1]), "mean_V": mean_V, "tau_qsl": rep.tau_qsl,
           "ratio": rep.tau_qsl / rep.tau, "flagged": rep.flagged, "bound_held": rep.bound_held}
    return list(row), [row]


# ---------------------------------------------------------------- output


def fmt_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.12g}") if math.isfinite(v) else str(v)
    return obj


def render_csv(cfg: RunConfig, columns, rows) -> str:
    buf = io.StringIO()
    buf.write("# phaseqsl " + json.dumps(_jsonable(cfg.echo()), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_value(r[c]) for c in columns])
    return buf.getvalue()


def render_json(cfg: RunConfig, residuals, passed: bool) -> str:
    doc = {"config": cfg.echo(), "residuals": residuals, "pass": passed}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        residuals, failures = cmd_verify(cfg)
        if failures:
            residuals["failures"] = failures
        emit(cfg, render_json(cfg, residuals, not failures))
        for f in failures:
            print(f"FAILED: {f}", file=sys.stderr)
        return EXIT_FAIL if failures else EXIT_OK
    if cfg.command == "cv-sweep":
        columns, rows = cmd_cv_sweep(cfg)
        errs = validate_cv_rows(cfg, rows)
    elif cfg.command == "qubit-sweep":
        columns, rows = cmd_qubit_sweep(cfg)
        errs = validate_qubit_rows(cfg, rows)
    else:
        columns, rows = cmd_tau(cfg)
        errs = [] if rows[0]["bound_held"] and rows[0]["ratio"] <= 1 else ["bound violated along the evolution"]
    if cfg.format == "csv":
        emit(cfg, render_csv(cfg, columns, rows))
    else:
        emit(cfg, render_json(cfg, {"rows": rows, "validator": errs}, not errs))
    for e in errs:
        print(f"FAILED: {e}", file=sys.stderr)
    return EXIT_FAIL if errs else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except (UsageError, PhaseSpaceError) as exc:
        print(f"phaseqsl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
