"""Unitary evolution, relative purity and the phase-space Liouville machinery.

Hilbert-space propagation is exact (spectral decomposition of ``H``) and
serves as the oracle for everything computed on phase space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import AccuracyWarning, DimensionMismatchError, InconsistencyError, NotHermitianError
from .sun_algebra import SUNBasis, build_basis
from .sun_phase_space import SUNMeasure, _radius, kernel_batch, symbol_on_measure

__all__ = [
    "EvolutionSpec",
    "PurityTrace",
    "evolve",
    "rho_dot",
    "relative_purity",
    "relative_purity_phase_space",
    "purity_rate",
    "purity_trace",
    "liouville_rate_sun",
    "star_product",
    "moyal_bracket_numeric",
]


@dataclass(frozen=True, eq=False)
class EvolutionSpec:
    H: np.ndarray
    rho0: np.ndarray
    hbar: float = 1.0
    times: np.ndarray | None = None
    _eig: tuple = field(init=False, repr=False, default=None)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        rho = np.asarray(self.rho0, dtype=complex)
        if H.shape != rho.shape or H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise DimensionMismatchError(f"H {H.shape} and rho0 {rho.shape} must be equal square shapes")
        if np.max(np.abs(H - H.conj().T)) > 1e-12:
            raise NotHermitianError("Hamiltonian is not Hermitian")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise NotHermitianError("rho0 is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise InconsistencyError("rho0 must have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise InconsistencyError("rho0 must be positive semidefinite")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if self.times is not None:
            times = np.asarray(self.times, dtype=float)
            if times[0] != 0 or np.any(np.diff(times) <= 0):
                raise ValueError("times must start at 0 and increase strictly")
            object.__setattr__(self, "times", times)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "rho0", rho)
        object.__setattr__(self, "_eig", scipy.linalg.eigh(H))

    @property
    def N(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class PurityTrace:
    P: np.ndarray
    Pdot: np.ndarray


def evolve(spec: EvolutionSpec, t: float) -> np.ndarray:
    """``exp(-iHt/hbar) rho0 exp(iHt/hbar)``."""
    if t == 0:
        return spec.rho0.copy()
    E, V = spec._eig
    U = (V * np.exp(-1j * E * t / spec.hbar)) @ V.conj().T
    return U @ spec.rho0 @ U.conj().T


def rho_dot(spec: EvolutionSpec, rho_t: np.ndarray) -> np.ndarray:
    return (spec.H @ rho_t - rho_t @ spec.H) / (1j * spec.hbar)


def relative_purity(rho0, rho_t) -> float:
    rho0, rho_t = np.asarray(rho0), np.asarray(rho_t)
    if rho0.shape != rho_t.shape:
        raise DimensionMismatchError("states have different dimensions")
    return float(np.einsum("ij,ji->", rho0, rho_t).real)


def relative_purity_phase_space(rho0, rho_t, s: float, measure: SUNMeasure, basis: SUNBasis) -> float:
    """``integral F^{-s}_{rho0} F^s_{rho_t}``."""
    f0 = symbol_on_measure(rho0, measure.R, -s, basis).real
    ft = symbol_on_measure(rho_t, measure.R, s, basis).real
    return float(measure.integrate(f0 * ft))


def _reconstruct(F, s: float, measure: SUNMeasure, basis: SUNBasis) -> np.ndarray:
    return np.einsum("p,pij->ij", measure.weights * F, kernel_batch(measure.R, -s, basis))


def star_product(FA, FB, s: float, measure: SUNMeasure, basis: SUNBasis, targets=None, s1=None, s2=None):
    """Generalized star product evaluated at ``targets`` (``R`` vectors; default the measure nodes).

    ``FA`` and ``FB`` are symbols at ``s1`` and ``s2`` (default ``s``) sampled on
    the measure.  The two inner integrals are carried out first, which turns
    the triple-kernel trace into ``Tr[A B Delta^s(eta)]`` with ``A`` and ``B``
    reconstructed on the measure.
    """
    s1 = s if s1 is None else s1
    s2 = s if s2 is None else s2
    A = _reconstruct(FA, s1, measure, basis)
    B = _reconstruct(FB, s2, measure, basis)
    R = measure.R if targets is None else np.atleast_2d(targets)
    return symbol_on_measure(A @ B, R, s, basis)


def _star_triple(FA, FB, s, s1, s2, measure, basis, targets):
    # literal double sum over the measure with the kernel trace tensor
    K1 = kernel_batch(measure.R, -s1, basis)
    K2 = kernel_batch(measure.R, -s2, basis)
    wa = measure.weights * FA
    wb = measure.weights * FB
    wa_r = measure.weights * FB
    wb_r = measure.weights * FA
    out_ab, out_ba = [], []
    flat1 = K1.reshape(len(K1), -1)
    for D in kernel_batch(targets, s, basis):
        M = np.einsum("qjk,ki->qij", K2, D)  # Delta''_q Delta(eta)
        T = flat1 @ M.reshape(len(M), -1).T  # T[p, q] = Tr[Delta'_p Delta''_q Delta(eta)]
        out_ab.append(wa @ T @ wb)
        if s1 == s2:
            out_ba.append(wa_r @ T @ wb_r)
    return np.array(out_ab), (np.array(out_ba) if out_ba else None)


def moyal_bracket_numeric(
    FH,
    Frho,
    s: float,
    measure: SUNMeasure,
    basis: SUNBasis,
    targets=None,
    hbar: float = 1.0,
    method: str = "triple",
    s1=None,
    s2=None,
    check_tol: float = 1e-6,
) -> np.ndarray:
    """``(1/(i hbar)) (F_H * F_rho - F_rho * F_H)`` at ``targets``.

    ``method="triple"`` sums the kernel-trace tensor over both measure copies
    explicitly (quadratic in the number of nodes, intended for qubits);
    ``method="factorized"`` integrates the inner sums first.  An
    :class:`AccuracyWarning` is raised when the measure fails to reconstruct
    the input operators to ``check_tol``.
    """
    s1 = s if s1 is None else s1
    s2 = s if s2 is None else s2
    targets = measure.R if targets is None else np.atleast_2d(targets)
    FH = np.asarray(FH)
    Frho = np.asarray(Frho)
    _check_reconstruction(FH, s1, measure, basis, check_tol)
    _check_reconstruction(Frho, s2, measure, basis, check_tol)
    if method == "triple":
        ab, ba = _star_triple(FH, Frho, s, s1, s2, measure, basis, targets)
        if ba is None:
            ba, _ = _star_triple(Frho, FH, s, s2, s1, measure, basis, targets)
    elif method == "factorized":
        ab = star_product(FH, Frho, s, measure, basis, targets, s1, s2)
        ba = star_product(Frho, FH, s, measure, basis, targets, s2, s1)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ((ab - ba) / (1j * hbar)).real


def _check_reconstruction(F, s, measure, basis, tol):
    if measure.is_mc:
        return
    A = _reconstruct(F, s, measure, basis)
    back = symbol_on_measure(A, measure.R, s, basis)
    err = float(np.max(np.abs(back - F)))
    if err > tol:
        warnings.warn(f"measure too coarse for the star product: symbol round-trip error {err:.2e}", AccuracyWarning, stacklevel=3)


def liouville_rate_sun(h, b_t, R, s: float, basis: SUNBasis, hbar: float = 1.0):
    """Closed-form ``d/dt F^s_{rho_t}(eta) = (2/hbar) r_s h_i b_j R_k f_ijk``.

    ``R`` may be a single vector or an array of them.
    """
    c = np.einsum("i,j,ijk->k", h, b_t, basis.structure_constants)
    return 2.0 / hbar * _radius(basis.N, s) * (np.asarray(R) @ c)


def purity_trace(spec: EvolutionSpec, times=None) -> PurityTrace:
    times = spec.times if times is None else np.asarray(times)
    P, Pd = [], []
    for t in times:
        rt = evolve(spec, t)
        P.append(relative_purity(spec.rho0, rt))
        Pd.append(purity_rate(spec, t))
    return PurityTrace(np.array(P), np.array(Pd))


def purity_rate(
    spec: EvolutionSpec,
    t: float,
    path: str = "A",
    s: float = 0.0,
    measure: SUNMeasure | None = None,
    basis: SUNBasis | None = None,
) -> float:
    """Rate of the relative purity.

    Path ``"A"`` is the operator trace ``Tr(rho0 [H, rho_t]) / (i hbar)``.
    Path ``"B"`` integrates ``F^{-s}_{rho0} {{F^s_H, F^s_{rho_t}}}`` and path
    ``"C"`` integrates ``F^{-s}_{rho_t} {{F^s_{rho0}, F^s_H}}`` over ``measure``;
    both use the factorized star product.
    """
    rho_t = evolve(spec, t)
    if path == "A":
        return float(np.trace(spec.rho0 @ rho_dot(spec, rho_t)).real)
    if measure is None:
        raise ValueError("phase-space paths need a measure")
    basis = basis or build_basis(spec.N)
    sym = lambda A, ss: symbol_on_measure(A, measure.R, ss, basis).real
    FH = sym(spec.H, s)
    if path == "B":
        br = moyal_bracket_numeric(FH, sym(rho_t, s), s, measure, basis, hbar=spec.hbar, method="factorized")
        return float(measure.integrate(sym(spec.rho0, -s) * br))
    if path == "C":
        br = moyal_bracket_numeric(sym(spec.rho0, s), FH, s, measure, basis, hbar=spec.hbar, method="factorized")
        return float(measure.integrate(sym(rho_t, -s) * br))
    raise ValueError(f"unknown path {path!r}")
