"""Speed-bound assembly, QSL times and tightest-s searches."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from . import cv
from .dynamics import EvolutionSpec, evolve, purity_rate, relative_purity, rho_dot
from .exceptions import BoundViolationError, InconsistencyError
from .sun_algebra import SUNBasis, build_basis, decompose
from .sun_phase_space import V_qsl_sun, chi_sun, v_qsl_sun, ratio_pure

__all__ = [
    "QSLReport",
    "TauQSL",
    "TightestS",
    "CoherentSystem",
    "SUNSystem",
    "assemble_V",
    "tau_qsl",
    "hilbert_bound",
    "qsl_report_sun",
    "qsl_report_coherent",
    "tightest_s",
    "corollary_check",
]

_ZERO = 1e-14


@dataclass
class QSLReport:
    s: float
    times: np.ndarray
    chi_s: np.ndarray
    chi_minus_s: np.ndarray
    v_s: np.ndarray
    V: np.ndarray
    P: np.ndarray
    Pdot: np.ndarray
    tau: float
    tau_qsl: float
    which_branch: np.ndarray
    flagged: bool = False
    bound_held: bool = True

    def max_violation(self) -> float:
        return float(np.max(np.abs(self.Pdot) - self.V))


@dataclass(frozen=True)
class TauQSL:
    tau: float
    P_tau: float
    mean_V: float
    tau_qsl: float
    flagged: bool = False

    @property
    def ratio(self) -> float:
        return self.tau_qsl / self.tau


@dataclass(frozen=True)
class TightestS:
    s: float
    V: float
    asymptotic: bool = False
    note: str = ""


@dataclass(frozen=True)
class CoherentSystem:
    omega_alpha0: float = 1.0


@dataclass(frozen=True)
class SUNSystem:
    h: np.ndarray
    b0: np.ndarray
    N: int
    hbar: float = 1.0


def assemble_V(chi_minus_s_0, chi_minus_s_t, v_s_0, v_s_t):
    """Pointwise ``min(chi^{-s}_t v^s(0), chi^{-s}_0 v^s(t))`` and the active branch."""
    parts = [np.asarray(x, dtype=float) for x in (chi_minus_s_0, chi_minus_s_t, v_s_0, v_s_t)]
    if any(np.any(p < 0) for p in parts):
        raise InconsistencyError("bound components must be non-negative")
    c0, ct, v0, vt = np.broadcast_arrays(*parts)
    first = ct * v0
    second = c0 * vt
    branch = np.where(first <= second, 0, 1)
    return np.minimum(first, second), branch


def tau_qsl(tau: float, P_tau: float, V, times=None, initial_purity: float = 1.0) -> TauQSL:
    """``(P_0 - P_tau) / <V>_tau`` with a trapezoidal time average.

    ``initial_purity`` is ``Tr rho0^2``; its default 1 gives the familiar
    ``1 - P_tau`` numerator for pure initial states.  A vanishing average
    speed with a non-zero numerator contradicts the bound and raises
    :class:`BoundViolationError`; with a vanishing numerator the QSL time is
    returned as 0 and flagged.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    V = np.atleast_1d(np.asarray(V, dtype=float))
    if V.size == 1:
        mean_V = float(V[0])
    else:
        times = np.linspace(0.0, tau, V.size) if times is None else np.asarray(times)
        mean_V = float(trapezoid(V, times) / (times[-1] - times[0]))
    num = initial_purity - P_tau
    if mean_V <= _ZERO:
        if abs(num) <= 1e-12:
            return TauQSL(tau, P_tau, mean_V, 0.0, flagged=True)
        raise BoundViolationError(f"average speed bound vanishes while the purity moved by {num:.3e}")
    return TauQSL(tau, P_tau, mean_V, num / mean_V)


def hilbert_bound(spec: EvolutionSpec, t: float) -> float:
    """``sqrt(Tr rho0^2 Tr |rho_dot_t|^2)``."""
    rd = rho_dot(spec, evolve(spec, t))
    p0 = float(np.trace(spec.rho0 @ spec.rho0).real)
    return math.sqrt(p0 * float(np.trace(rd.conj().T @ rd).real))


def qsl_report_sun(spec: EvolutionSpec, s: float, basis: SUNBasis | None = None, times=None) -> QSLReport:
    """Closed-form bound along the exact evolution, with the oracle purity and its rate."""
    basis = basis or build_basis(spec.N)
    times = spec.times if times is None else np.asarray(times, dtype=float)
    N = spec.N
    h = decompose(spec.H, basis).vector
    b0 = decompose(spec.rho0, basis).vector
    chi_s, chi_ms, v_s, V, P, Pd, br = ([] for _ in range(7))
    for t in times:
        rho_t = evolve(spec, t)
        bt = decompose(rho_t, basis).vector
        chi_s.append(chi_sun(bt, s, N))
        chi_ms.append(chi_sun(bt, -s, N))
        v_s.append(v_qsl_sun(h, bt, s, N, basis, spec.hbar))
        val, branch = V_qsl_sun(h, b0, bt, s, N, basis, spec.hbar)
        V.append(val)
        br.append(branch)
        P.append(relative_purity(spec.rho0, rho_t))
        Pd.append(purity_rate(spec, t))
    V = np.array(V)
    Pd = np.array(Pd)
    tau = float(times[-1])
    held = bool(np.all(np.abs(Pd) <= V + 1e-10))
    p0 = float(np.trace(spec.rho0 @ spec.rho0).real)
    tq = tau_qsl(tau, P[-1], V, times, initial_purity=p0)
    return QSLReport(
        s, times, np.array(chi_s), np.array(chi_ms), np.array(v_s), V, np.array(P), Pd,
        tau, tq.tau_qsl, np.array(br), tq.flagged, held,
    )


def qsl_report_coherent(omega: float, alpha0: complex, s: float, times) -> QSLReport:
    """Coherent state under ``hbar omega (a^dag a + 1/2)``; every quantity in closed form."""
    times = np.asarray(times, dtype=float)
    n = times.size
    oa = omega * abs(alpha0)
    chi_ms = np.full(n, cv.chi_cv(-s))
    v = np.full(n, cv.v_qsl_cv(oa, s))
    V, br = assemble_V(chi_ms, chi_ms, v, v)
    a2 = abs(alpha0) ** 2
    P = np.exp(-2 * a2 * (1 - np.cos(omega * times)))
    Pd = -2 * a2 * omega * np.sin(omega * times) * P
    tau = float(times[-1])
    tq = tau_qsl(tau, float(P[-1]), V, times)
    return QSLReport(
        s, times, np.full(n, cv.chi_cv(s)), chi_ms, v, V, P, Pd, tau, tq.tau_qsl, br,
        tq.flagged, bool(np.all(np.abs(Pd) <= V + 1e-10)),
    )


def tightest_s(system, s_range=(-0.99, 0.99), mode: str = "closed-form") -> TightestS:
    """Phase space with the smallest bound.

    For a coherent state the optimum is interior and found by golden-section
    search (``mode="numeric"`` runs it on the quadrature bound).  For SU(N)
    systems the bound decreases monotonically as ``s -> -inf``; the limit value
    is returned with ``asymptotic=True``.
    """
    lo, hi = s_range
    if isinstance(system, CoherentSystem):
        oa = system.omega_alpha0
        if mode == "closed-form":
            s_star = cv.optimal_s_cv(lo, hi)
            return TightestS(s_star, cv.V_qsl_cv(oa, s_star))
        s_star, val = cv._golden(lambda s: cv.V_qsl_cv_numeric(oa, s), lo, hi, 1e-8)
        return TightestS(s_star, val, note="quadrature")
    if isinstance(system, SUNSystem):
        basis = build_basis(system.N)
        f = lambda s: V_qsl_sun(system.h, system.b0, system.b0, s, system.N, basis, system.hbar)[0]
        grid = np.linspace(lo, hi, 41)
        vals = np.array([f(s) for s in grid])
        monotone = bool(np.all(np.diff(vals) >= -1e-15))
        note = "monotone on sampled grid" if monotone else "non-monotone on sampled grid"
        return TightestS(-math.inf, f(-math.inf), asymptotic=True, note=note)
    raise TypeError(f"unsupported system descriptor {type(system).__name__}")


def corollary_check(h, b, s_list, N: int = 2, basis: SUNBasis | None = None, hbar: float = 1.0) -> dict:
    """Residuals of ``v0^2 = v^{-s} v^s`` and the signed deviation ``V0^2 - V^{-s} V^s``."""
    basis = basis or build_basis(N)
    v0 = v_qsl_sun(h, b, 0.0, N, basis, hbar)
    V0 = V_qsl_sun(h, b, b, 0.0, N, basis, hbar)[0]
    rows = []
    for s in s_list:
        vp, vm = v_qsl_sun(h, b, s, N, basis, hbar), v_qsl_sun(h, b, -s, N, basis, hbar)
        Vp = V_qsl_sun(h, b, b, s, N, basis, hbar)[0]
        Vm = V_qsl_sun(h, b, b, -s, N, basis, hbar)[0]
        rows.append({"s": float(s), "v_residual": abs(v0 * v0 - vp * vm), "V_deviation": V0 * V0 - Vp * Vm})
    return {
        "rows": rows,
        "max_v_residual": max(r["v_residual"] for r in rows),
        "max_abs_V_deviation": max(abs(r["V_deviation"]) for r in rows),
    }
