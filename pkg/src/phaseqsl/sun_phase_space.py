"""s-parametrized phase space of an N-level system.

Points are pure states ``|eta>``; the kernel is

    Delta^s(eta) = 1/N + 4 r_s R_a T_a,     R_a = <eta|T_a|eta>,
    r_s = (N+1)**((1+s)/2) / 2,

and the invariant measure has total weight ``N``.  For qubits the measure is
a deterministic product rule on the Bloch sphere, ``dOmega / (2 pi)``; for
larger ``N`` Haar-random states are used with weight ``N / M`` each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import unitary_group

from .exceptions import DimensionMismatchError, MeasureQualityError, InvalidDimensionError
from .sun_algebra import SUNBasis, build_basis, decompose, random_hermitian

__all__ = [
    "SUNPoint",
    "SUNMeasure",
    "SpinRadius",
    "spin_radius",
    "sw_kernel_sun",
    "kernel_batch",
    "build_measure",
    "sw_symbol_sun",
    "symbol_on_measure",
    "verify_sw_criteria",
    "chi_sun",
    "chi_sun_numeric",
    "contract_rate_vector",
    "v_qsl_sun",
    "V_qsl_sun",
    "V_qsl_qubit_pure",
    "ratio_pure",
    "ratio_bound_max",
    "kernel_decomposition_qubit",
]


def _bloch_R(states: np.ndarray, basis: SUNBasis) -> np.ndarray:
    return np.einsum("pi,aij,pj->pa", states.conj(), basis.generators, states).real


@dataclass(frozen=True, eq=False)
class SUNPoint:
    state: np.ndarray
    R: np.ndarray

    @classmethod
    def from_state(cls, state, basis: SUNBasis) -> "SUNPoint":
        psi = np.asarray(state, dtype=complex)
        if psi.shape != (basis.N,):
            raise DimensionMismatchError(f"state has shape {psi.shape}, basis has N={basis.N}")
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"phase-space points are unit vectors, got norm {nrm}")
        return cls(psi, _bloch_R(psi[None], basis)[0])


@dataclass(frozen=True)
class SpinRadius:
    N: int
    s: float
    value: float


def _radius(N: int, s: float) -> float:
    if np.isneginf(s):
        return 0.0
    return 0.5 * (N + 1) ** (0.5 * (1.0 + s))


def spin_radius(N: int, s: float) -> SpinRadius:
    if N < 2:
        raise InvalidDimensionError("N >= 2 required")
    if not np.isfinite(s):
        raise ValueError("spin radius needs a finite s; use the limit formulas for s -> -inf")
    return SpinRadius(N, float(s), _radius(N, s))


@dataclass(frozen=True, eq=False)
class SUNMeasure:
    """Discretized ``d mu(eta)``: states, their ``R`` vectors and weights."""

    N: int
    states: np.ndarray  # (M, N)
    R: np.ndarray  # (M, N**2 - 1)
    weights: np.ndarray  # (M,)
    kind: str
    seed: int | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def is_mc(self) -> bool:
        return self.kind == "haar-monte-carlo"

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> np.ndarray:
        """Weighted sum over the first axis of ``values``."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def standard_error(self, values) -> np.ndarray:
        """Standard error of :meth:`integrate` for real samples (zero for deterministic rules)."""
        values = np.asarray(values)
        if not self.is_mc:
            return np.zeros(values.shape[1:])
        M = len(self.weights)
        scaled = self.N * values
        return np.std(scaled, axis=0, ddof=1) / math.sqrt(M)


def kernel_batch(R: np.ndarray, s: float, basis: SUNBasis) -> np.ndarray:
    R = np.atleast_2d(R)
    N = basis.N
    return np.eye(N) / N + 4.0 * _radius(N, s) * np.einsum("pa,aij->pij", R, basis.generators)


def sw_kernel_sun(point: SUNPoint, s: float, basis: SUNBasis) -> np.ndarray:
    if point.state.shape[0] != basis.N:
        raise DimensionMismatchError("point and basis dimensions differ")
    return kernel_batch(point.R[None], s, basis)[0]


def _sphere_measure(n_theta: int, n_phi: int, basis: SUNBasis) -> SUNMeasure:
    x, wx = np.polynomial.legendre.leggauss(n_theta)  # x = cos(theta)
    theta = np.arccos(x)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    states = np.stack([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)], axis=-1).reshape(-1, 2)
    w = (wx[:, None] * np.full(n_phi, 2 * np.pi / n_phi)[None, :]).ravel() / (2 * np.pi)
    return SUNMeasure(2, states, _bloch_R(states, basis), w, "deterministic-sphere")


def _haar_measure(N: int, samples: int, seed: int, basis: SUNBasis) -> SUNMeasure:
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.normal(size=(samples, N)) + 1j * rng.normal(size=(samples, N))
    states = g / np.linalg.norm(g, axis=1, keepdims=True)
    w = np.full(samples, N / samples)
    return SUNMeasure(N, states, _bloch_R(states, basis), w, "haar-monte-carlo", seed)


def build_measure(
    N: int,
    kind: str | None = None,
    resolution: tuple[int, int] = (16, 32),
    samples: int = 100_000,
    seed: int = 0,
    basis: SUNBasis | None = None,
) -> SUNMeasure:
    """Realize the invariant measure and check its three moment identities.

    ``kind`` defaults to ``"deterministic-sphere"`` for qubits and
    ``"haar-monte-carlo"`` otherwise.  The identities are total weight ``N``,
    vanishing first moments of ``R`` and second moments
    ``delta_ab / (2 (N+1))``; a :class:`MeasureQualityError` carrying the
    residuals is raised when one of them misses its tolerance.
    """
    basis = basis or build_basis(N)
    kind = kind or ("deterministic-sphere" if N == 2 else "haar-monte-carlo")
    if kind == "deterministic-sphere":
        if N != 2:
            raise InvalidDimensionError("the deterministic sphere rule exists for N = 2 only")
        n_theta, n_phi = resolution
        if n_theta < 16 or n_phi < 32:
            raise ValueError("sphere rule needs at least 16 x 32 nodes")
        m = _sphere_measure(n_theta, n_phi, basis)
    elif kind == "haar-monte-carlo":
        if samples < 1000:
            raise ValueError("Monte-Carlo measure needs at least 1000 samples")
        m = _haar_measure(N, samples, seed, basis)
    else:
        raise ValueError(f"unknown measure kind {kind!r}")

    dim = basis.dim
    e1 = abs(m.weights.sum() - N)
    first = m.integrate(m.R)
    second = m.integrate(np.einsum("pa,pb->pab", m.R, m.R))
    target2 = np.eye(dim) / (2 * (N + 1))
    res = {"E1": float(e1), "E2": float(np.max(np.abs(first))), "E3": float(np.max(np.abs(second - target2)))}
    if m.is_mc:
        se1 = m.standard_error(m.R)
        se2 = m.standard_error(np.einsum("pa,pb->pab", m.R, m.R))
        res["E2_z"] = float(np.max(np.abs(first) / se1))
        res["E3_z"] = float(np.max(np.abs(second - target2) / np.where(se2 > 0, se2, np.inf)))
        ok = res["E1"] <= 1e-10 and res["E2_z"] <= 5 and res["E3_z"] <= 5
    else:
        ok = res["E1"] <= 1e-10 and res["E2"] <= 1e-10 and res["E3"] <= 1e-8
    if not ok:
        raise MeasureQualityError(f"measure misses its identity tolerances: {res}", res)
    m.residuals.update(res)
    return m


def sw_symbol_sun(A, point: SUNPoint, s: float, basis: SUNBasis) -> float:
    """``Tr(A)/N + 2 r_s R . a`` with ``a_a = 2 Tr(A T_a)``; real for Hermitian ``A``."""
    A = np.asarray(A)
    if A.shape != (basis.N, basis.N):
        raise DimensionMismatchError("operator and basis dimensions differ")
    dec = decompose(A, basis)
    return dec.trace_part + 2.0 * _radius(basis.N, s) * float(point.R @ dec.vector)


def symbol_on_measure(A, R: np.ndarray, s: float, basis: SUNBasis) -> np.ndarray:
    """Symbols of a (possibly non-Hermitian) operator at many points, via ``Tr[A Delta^s]``."""
    K = kernel_batch(R, s, basis)
    return np.einsum("ij,pji->p", np.asarray(A, dtype=complex), K)


def chi_sun(b, s: float, N: int) -> float:
    """``sqrt(1/N + 2 r_s^2 |b|^2 / (N+1))``."""
    b2 = float(np.dot(b, b))
    if np.isneginf(s):
        return math.sqrt(1.0 / N)
    return math.sqrt(1.0 / N + 2.0 * _radius(N, s) ** 2 * b2 / (N + 1))


def chi_sun_numeric(rho, s: float, measure: SUNMeasure, basis: SUNBasis) -> float:
    F = symbol_on_measure(rho, measure.R, s, basis).real
    return math.sqrt(float(measure.integrate(F * F)))


def contract_rate_vector(h, b, basis: SUNBasis) -> np.ndarray:
    """``c_k = h_i b_j f_ijk``; the density-matrix velocity is ``c . T / hbar``."""
    return np.einsum("i,j,ijk->k", h, b, basis.structure_constants)


def v_qsl_sun(h, b, s: float, N: int, basis: SUNBasis | None = None, hbar: float = 1.0) -> float:
    basis = basis or build_basis(N)
    c = contract_rate_vector(h, b, basis)
    return _radius(N, s) / hbar * math.sqrt(2.0 / (N + 1)) * float(np.linalg.norm(c))


def _branch(N: int, s: float, b_chi, c_v, hbar: float) -> float:
    # chi^{-s}(b) * v^s(c) written without r_s so that s = -inf is exact
    w = 0.0 if np.isneginf(s) else (N + 1.0) ** s
    return math.sqrt(w / N + 0.5 * float(np.dot(b_chi, b_chi))) * float(np.linalg.norm(c_v)) / (math.sqrt(2.0) * hbar)


def V_qsl_sun(h, b0, bt, s: float, N: int, basis: SUNBasis | None = None, hbar: float = 1.0) -> tuple[float, int]:
    """Bound at time ``t`` from the initial and evolved Bloch vectors.

    Returns ``(value, branch)`` where ``branch`` is 0 when
    ``chi^{-s}_t v^s(0)`` is the smaller product and 1 for ``chi^{-s}_0 v^s(t)``.
    ``s = -inf`` is accepted and evaluated through its limit.
    """
    basis = basis or build_basis(N)
    c0 = contract_rate_vector(h, b0, basis)
    ct = contract_rate_vector(h, bt, basis)
    first = _branch(N, s, bt, c0, hbar)
    second = _branch(N, s, b0, ct, hbar)
    return (first, 0) if first <= second else (second, 1)


def V_qsl_qubit_pure(delta_E: float, s: float, hbar: float = 1.0) -> float:
    """``sqrt(1 + 3^s) dE / hbar`` for a pure qubit state."""
    w = 0.0 if np.isneginf(s) else 3.0 ** s
    return math.sqrt(1.0 + w) * delta_E / hbar


def ratio_pure(N: int, s: float) -> float:
    """``V^0 / V^s`` for pure initial states."""
    w = 0.0 if np.isneginf(s) else (N + 1.0) ** s
    return math.sqrt(N / (w + N - 1))


def ratio_bound_max(N: int) -> tuple[float, float]:
    """Largest achievable ``V^0 / V^s`` and the corresponding fractional reduction of the bound."""
    if N < 2:
        raise InvalidDimensionError("N >= 2 required")
    return math.sqrt(N / (N - 1)), 1.0 - math.sqrt(1.0 - 1.0 / N)


_SY = np.array([[0, -1j], [1j, 0]])
_SZ = np.diag([1.0, -1.0]).astype(complex)


def _rot(axis: np.ndarray, angle: float) -> np.ndarray:
    return math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * axis


def kernel_decomposition_qubit(theta: float, phi: float, Phi: float, s: float) -> np.ndarray:
    """Qubit kernel as a rotated spin parity ``U Pi^s U^dagger``, ``Pi^s = 1/2 + r_s sigma_z``."""
    U = _rot(_SZ, phi) @ _rot(_SY, theta) @ _rot(_SZ, Phi)
    Pi = 0.5 * np.eye(2) + _radius(2, s) * _SZ
    return U @ Pi @ U.conj().T


# --- SW criteria -----------------------------------------------------------

KernelFn = Callable[[np.ndarray, float], np.ndarray]


def _entry(residual, z=None, tolerance=None, passed=None):
    out = {"residual": float(residual)}
    if z is not None:
        out["z"] = float(z)
    if tolerance is not None:
        out["tolerance"] = float(tolerance)
    if passed is not None:
        out["pass"] = bool(passed)
    return out


def _complex_parts(x):
    x = np.asarray(x)
    return np.concatenate([np.ravel(x.real), np.ravel(x.imag)])


def verify_sw_criteria(
    N: int,
    s: float,
    measure: SUNMeasure,
    basis: SUNBasis | None = None,
    trials: int = 5,
    seed: int = 1,
    tolerance: float = 1e-7,
    z_max: float = 5.0,
    kernel: KernelFn | None = None,
) -> dict:
    """Residuals of the five SW criteria over random Hermitian test operators.

    Deterministic measures are judged by absolute ``tolerance``; Monte-Carlo
    measures by ``z``, the residual in units of the sampling standard error,
    against ``z_max``.  ``kernel(states, s)`` may replace the built-in kernel
    (used to exercise the checks themselves).
    """
    basis = basis or build_basis(N)
    if kernel is None:
        kernel = lambda states, ss: kernel_batch(_bloch_R(states, basis), ss, basis)
    rng = np.random.default_rng(seed)
    Ks, Kms = kernel(measure.states, s), kernel(measure.states, -s)
    eye = np.eye(N)
    acc = {k: [0.0, 0.0] for k in ("SW-1", "SW-2", "SW-3", "SW-4", "SW-5")}

    def record(name, est, target, samples):
        res = np.max(np.abs(est - target))
        acc[name][0] = max(acc[name][0], float(res))
        if measure.is_mc:
            samples = np.asarray(samples)
            se = np.concatenate([np.ravel(measure.standard_error(samples.real)), np.ravel(measure.standard_error(samples.imag))])
            diff = np.abs(_complex_parts(est - target))
            # rounding-level residue carries no statistical information
            diff = np.where(diff > 1e-12, diff, 0.0)
            z = np.max(np.where(se > 0, diff / np.where(se > 0, se, 1.0), np.where(diff > 0, np.inf, 0.0)))
            acc[name][1] = max(acc[name][1], float(z))

    acc["SW-2"][0] = float(np.max(np.abs(Ks - Ks.conj().transpose(0, 2, 1))))
    record("SW-3", measure.integrate(Ks), eye, Ks)
    for _ in range(trials):
        A = random_hermitian(N, rng)
        B = random_hermitian(N, rng)
        FA = np.einsum("ij,pji->p", A, Ks)
        FBm = np.einsum("ij,pji->p", B, Kms)
        acc["SW-2"][0] = max(acc["SW-2"][0], float(np.max(np.abs(FA.imag))))
        X = FA[:, None, None] * Kms
        record("SW-1", measure.integrate(X), A, X)
        record("SW-3", measure.integrate(FA), np.trace(A), FA)
        P = FA * FBm
        record("SW-5", measure.integrate(P), np.trace(A @ B), P)
        U = unitary_group.rvs(N, random_state=rng)
        pts = measure.states[: min(len(measure), 64)]
        lhs = np.einsum("ij,pji->p", U @ A @ U.conj().T, kernel(pts, s))
        rhs = np.einsum("ij,pji->p", A, kernel(pts @ U.conj(), s))
        acc["SW-4"][0] = max(acc["SW-4"][0], float(np.max(np.abs(lhs - rhs))))

    report = {}
    for name, (res, z) in acc.items():
        statistical = measure.is_mc and name in ("SW-1", "SW-3", "SW-5")
        if statistical:
            report[name] = _entry(res, z=z, tolerance=z_max, passed=z <= z_max)
        else:
            report[name] = _entry(res, tolerance=tolerance, passed=res <= tolerance)
    return report
