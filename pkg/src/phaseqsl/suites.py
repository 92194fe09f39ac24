"""Seeded verification suites shared by ``phaseqsl verify`` and the test-suite.

Each suite returns a JSON-serializable dict that carries at least a boolean
``pass`` and the worst residual it observed.
"""

from __future__ import annotations

import math

import numpy as np

from . import cv, discrete
from .dynamics import EvolutionSpec, evolve, liouville_rate_sun, moyal_bracket_numeric, purity_rate, rho_dot
from .qsl import hilbert_bound, tau_qsl
from .sun_algebra import BlochDecomposition, build_basis, decompose, random_density_matrix, random_hermitian, reconstruct
from .sun_phase_space import (
    V_qsl_sun,
    _bloch_R,
    build_measure,
    chi_sun,
    kernel_batch,
    ratio_bound_max,
    ratio_pure,
    symbol_on_measure,
    v_qsl_sun,
    verify_sw_criteria,
)

__all__ = [
    "random_instances",
    "sw_suite",
    "corollary_suite",
    "hilbert_equivalence_suite",
    "bound_validity_suite",
    "discrete_agreement_suite",
    "moyal_suite",
    "ratio_suite",
    "tau_examples",
    "corrupt_sun_kernel",
]


def random_instances(n: int, seed: int, dims=(2, 3), s_range=(-3.0, 3.0)):
    """Random ``(N, H, rho0, s)`` tuples; every fourth state is pure."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        N = dims[i % len(dims)]
        H = random_hermitian(N, rng)
        rho = random_density_matrix(N, rng, rank=1 if i % 4 == 0 else None)
        out.append((N, H, rho, float(rng.uniform(*s_range))))
    return out


def corrupt_sun_kernel(basis, eps: float = 1e-3):
    """SU(N) kernel with an anti-Hermitian admixture, for fault-injection runs."""

    def kernel(states, s):
        R = _bloch_R(states, basis)
        K = kernel_batch(R, s, basis)
        return K + 1j * eps * R[:, -1][:, None, None] * np.eye(basis.N)

    return kernel


def _failed(report: dict) -> list[str]:
    return [k for k, v in report.items() if isinstance(v, dict) and not v.get("pass", True)]


def sw_suite(mc_samples: int = 100_000, seed: int = 0, sphere=(16, 32), corrupt: bool = False) -> dict:
    """SW-1..SW-5 for the CV, SU(2), SU(3) and discrete phase spaces."""
    spaces = {}
    for s in (-0.5, 0.0, 0.5):
        spaces[f"cv[s={s:g}]"] = cv.verify_sw_criteria_cv(s)
    b2 = build_basis(2)
    m2 = build_measure(2, resolution=sphere, basis=b2)
    kern = corrupt_sun_kernel(b2) if corrupt else None
    for s in (-1.0, 0.0, 1.0):
        spaces[f"su2[s={s:g}]"] = verify_sw_criteria(2, s, m2, b2, tolerance=1e-7, kernel=kern)
    b3 = build_basis(3)
    m3 = build_measure(3, samples=mc_samples, seed=seed, basis=b3)
    for s in (-1.0, 0.0, 1.0):
        spaces[f"su3[s={s:g}]"] = verify_sw_criteria(3, s, m3, b3, z_max=5.0)
    for s in (-1.0, 0.0, 1.0):
        spaces[f"discrete[s={s:g}]"] = discrete.verify_sw_criteria_discrete(s, tolerance=1e-12)
    failures = [f"{name}.{crit}" for name, rep in spaces.items() for crit in _failed(rep)]
    return {
        "spaces": spaces,
        "measures": {"su2": m2.residuals, "su3": m3.residuals},
        "failures": failures,
        "pass": not failures,
    }


def corollary_suite(n: int = 100, seed: int = 11, tol: float = 1e-12) -> dict:
    bases = {N: build_basis(N) for N in (2, 3)}
    worst = 0.0
    for N, H, rho, s in random_instances(n, seed):
        basis = bases[N]
        h = decompose(H, basis).vector
        b = decompose(rho, basis).vector
        v0 = v_qsl_sun(h, b, 0.0, N, basis)
        worst = max(worst, abs(v0 * v0 - v_qsl_sun(h, b, s, N, basis) * v_qsl_sun(h, b, -s, N, basis)))
    return {"instances": n, "max_residual": worst, "tolerance": tol, "pass": worst <= tol}


def hilbert_equivalence_suite(n: int = 100, seed: int = 11, tol: float = 1e-10) -> dict:
    """Phase-space ``V^0`` against ``sqrt(Tr rho0^2 Tr|rho_dot|^2)`` along the evolution."""
    bases = {N: build_basis(N) for N in (2, 3)}
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for N, H, rho, _ in random_instances(n, seed):
        basis = bases[N]
        spec = EvolutionSpec(H, rho)
        h = decompose(H, basis).vector
        b0 = decompose(rho, basis).vector
        for t in (0.0, float(rng.uniform(0, 5))):
            bt = decompose(evolve(spec, t), basis).vector
            V0 = V_qsl_sun(h, b0, bt, 0.0, N, basis)[0]
            worst = max(worst, abs(V0 - hilbert_bound(spec, t)))
    return {"instances": n, "max_residual": worst, "tolerance": tol, "pass": worst <= tol}


def bound_validity_suite(n: int = 200, seed: int = 23, s_values=(-2.0, -1.0, 0.0, 1.0), n_times: int = 100, tol: float = 1e-10) -> dict:
    """``|dP/dt| <= V^s(t)`` on a time grid and ``tau_QSL <= tau`` per run."""
    bases = {N: build_basis(N) for N in (2, 3)}
    rng = np.random.default_rng(seed + 7)
    worst = -math.inf
    worst_tau = -math.inf
    runs = 0
    for N, H, rho, _ in random_instances(n, seed):
        basis = bases[N]
        tau = float(rng.uniform(0.5, 5.0))
        times = np.linspace(0.0, tau, n_times)
        spec = EvolutionSpec(H, rho, times=times)
        h = decompose(H, basis).vector
        b0 = decompose(rho, basis).vector
        rhos = [evolve(spec, t) for t in times]
        bts = [decompose(r, basis).vector for r in rhos]
        Pd = np.array([np.trace(rho @ rho_dot(spec, r)).real for r in rhos])
        P_tau = float(np.trace(rho @ rhos[-1]).real)
        p0 = float(np.trace(rho @ rho).real)
        for s in s_values:
            V = np.array([V_qsl_sun(h, b0, bt, s, N, basis)[0] for bt in bts])
            worst = max(worst, float(np.max(np.abs(Pd) - V)))
            tq = tau_qsl(tau, P_tau, V, times, initial_purity=p0)
            worst_tau = max(worst_tau, tq.tau_qsl - tau)
            runs += 1
    return {
        "runs": runs,
        "max_violation": worst,
        "max_tau_excess": worst_tau,
        "tolerance": tol,
        "pass": worst <= tol and worst_tau <= 0.0,
    }


def discrete_agreement_suite(n: int = 100, seed: int = 31, tol: float = 1e-10) -> dict:
    b2 = build_basis(2)
    worst_chi = worst_v = 0.0
    for _, H, rho, s in random_instances(n, seed, dims=(2,)):
        h = decompose(H, b2).vector
        b = decompose(rho, b2).vector
        worst_chi = max(worst_chi, abs(discrete.discrete_chi(rho, s) - chi_sun(b, s, 2)))
        worst_v = max(worst_v, abs(discrete.discrete_v_qsl(rho, H, s) - v_qsl_sun(h, b, s, 2, b2)))
    return {
        "instances": n,
        "max_chi_residual": worst_chi,
        "max_v_residual": worst_v,
        "tolerance": tol,
        "pass": max(worst_chi, worst_v) <= tol,
    }


def moyal_suite(seed: int = 41, nodes=(32, 64), n_points: int = 8, s: float = 0.0, rel_tol: float = 0.01) -> dict:
    """Triple-kernel Moyal bracket on the sphere rule against the closed-form Liouville rate."""
    rng = np.random.default_rng(seed)
    b2 = build_basis(2)
    m = build_measure(2, resolution=nodes, basis=b2)
    H = random_hermitian(2, rng)
    rho = random_density_matrix(2, rng, rank=1)
    h = decompose(H, b2).vector
    b = decompose(rho, b2).vector
    targets = m.R[rng.choice(len(m), n_points, replace=False)]
    FH = symbol_on_measure(H, m.R, s, b2).real
    Fr = symbol_on_measure(rho, m.R, s, b2).real
    numeric = moyal_bracket_numeric(FH, Fr, s, m, b2, targets=targets, method="triple")
    closed = liouville_rate_sun(h, b, targets, s, b2)
    rel = np.abs(numeric - closed) / np.abs(closed)
    return {"points": n_points, "nodes": list(nodes), "max_relative_error": float(rel.max()), "tolerance": rel_tol, "pass": bool(rel.max() <= rel_tol)}


def ratio_suite(seed: int = 51, tol: float = 1e-12) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for N in (2, 3, 4):
        basis = build_basis(N)
        for _ in range(10):
            H = random_hermitian(N, rng)
            rho = random_density_matrix(N, rng, rank=1)
            h = decompose(H, basis).vector
            b = decompose(rho, basis).vector
            V0 = V_qsl_sun(h, b, b, 0.0, N, basis)[0]
            for s in np.linspace(-4, 3, 15):
                Vs = V_qsl_sun(h, b, b, s, N, basis)[0]
                worst = max(worst, abs(V0 / Vs - ratio_pure(N, s)))
    ratio, reduction = ratio_bound_max(2)
    pct = 100 * reduction
    ok = worst <= tol and abs(pct - 29.2893) <= 1e-4
    return {"max_residual": worst, "max_ratio_N2": ratio, "reduction_percent_N2": pct, "pass": ok}


def tau_examples() -> dict:
    from .qsl import qsl_report_coherent, qsl_report_sun

    x = math.pi / 4
    psi = np.array([math.cos(x), math.sin(x)])
    spec = EvolutionSpec(0.5 * np.diag([1.0, -1.0]), np.outer(psi, psi), times=np.linspace(0, math.pi, 101))
    qubit = qsl_report_sun(spec, 0.0).tau_qsl
    coherent = qsl_report_coherent(1.0, 1.0, 0.0, np.linspace(0, math.pi, 101)).tau_qsl
    e_q = abs(qubit - math.sqrt(2))
    e_c = abs(coherent - (1 - math.exp(-4)) / math.sqrt(2))
    return {"qubit": qubit, "coherent": coherent, "qubit_error": e_q, "coherent_error": e_c, "pass": e_q <= 1e-8 and e_c <= 1e-6}
