"""Wootters 2x2 lattice phase space of a qubit.

Lattice points ``(a1, a2)`` are ordered ``(0,0) < (0,1) < (1,0) < (1,1)`` and
the measure is ``1/2 sum_eta``.  The phase-point operators are the SU(2)
kernel evaluated on the four tetrahedral Bloch directions
``((-1)^a2, (-1)^(a1+a2), (-1)^a1) / sqrt(3)``:

    Delta^s(a1, a2) = 1/2 + (r_s / sqrt 3) [(-1)^a1 Z + (-1)^a2 X + (-1)^(a1+a2) Y].

At ``s = 0`` the coefficient is 1/2 and the operators are Wootters' ones.

Products of lattice symbols use the three-point structure function
``Gamma_{eta beta gamma} = Tr[Delta(eta) Delta(beta) Delta(gamma)]`` at
``s = 0``, written as ``d + d + d - 1/2 - i sign * eps``.  The sign in front
of the Levi-Civita term is fixed once, at import, by requiring the star
product to reproduce operator products of Pauli matrices; see
:data:`EPSILON_CONVENTION`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NotHermitianError

__all__ = [
    "LatticePoint",
    "LATTICE",
    "DiscreteSymbol",
    "wootters_kernel",
    "discrete_symbol",
    "levi_civita4",
    "gamma_structure",
    "gamma_tensor",
    "structure_tensor",
    "discrete_star",
    "discrete_bracket",
    "discrete_chi",
    "discrete_v_qsl",
    "homomorphism_residual",
    "verify_sw_criteria_discrete",
    "EPSILON_CONVENTION",
]

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
PAULIS = (_I, _X, _Y, _Z)


@dataclass(frozen=True, order=True)
class LatticePoint:
    a1: int
    a2: int

    def __post_init__(self):
        if self.a1 not in (0, 1) or self.a2 not in (0, 1):
            raise ValueError(f"lattice coordinates must be 0 or 1, got ({self.a1}, {self.a2})")

    @property
    def index(self) -> int:
        return 2 * self.a1 + self.a2


LATTICE = tuple(LatticePoint(a1, a2) for a1 in (0, 1) for a2 in (0, 1))


@dataclass(frozen=True)
class DiscreteSymbol:
    values: np.ndarray  # length 4, lattice order
    s: float = 0.0

    def __getitem__(self, point: LatticePoint):
        return self.values[point.index]

    def total(self) -> complex:
        """``1/2 sum_eta F(eta)``, the trace of the source operator."""
        return 0.5 * self.values.sum()


def _radius(s: float) -> float:
    return 0.5 * 3.0 ** (0.5 * (1.0 + s))


def _signs(point: LatticePoint) -> tuple[int, int, int]:
    """Bloch direction of a lattice point (x, y, z components, unnormalized)."""
    a1, a2 = point.a1, point.a2
    return (-1) ** a2, (-1) ** (a1 + a2), (-1) ** a1


def wootters_kernel(point: LatticePoint, s: float) -> np.ndarray:
    c = _radius(s) / math.sqrt(3.0)
    sx, sy, sz = _signs(point)
    return 0.5 * _I + c * (sz * _Z + sx * _X + sy * _Y)


def _kernels(s: float) -> np.ndarray:
    return np.array([wootters_kernel(p, s) for p in LATTICE])


def discrete_symbol(A, s: float, check_hermitian: bool = True) -> DiscreteSymbol:
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise ValueError("lattice symbols are defined for 2x2 operators")
    herm = np.max(np.abs(A - A.conj().T)) <= 1e-12
    if check_hermitian and not herm:
        raise NotHermitianError("operator is not Hermitian")
    vals = np.einsum("ij,pji->p", A, _kernels(s))
    return DiscreteSymbol(vals.real if herm else vals, s)


def levi_civita4(i: int, j: int, k: int, l: int) -> int:
    idx = (i, j, k, l)
    if len(set(idx)) < 4:
        return 0
    # parity by counting inversions
    inv = sum(1 for a, b in itertools.combinations(idx, 2) if a > b)
    return -1 if inv % 2 else 1


def _gamma(eta: int, beta: int, gamma: int, sign: int) -> complex:
    delta = (eta == beta) + (eta == gamma) + (beta == gamma)
    eps = sum(levi_civita4(eta, beta, gamma, k) for k in range(4))
    return delta - 0.5 - 1j * sign * eps


def _tensor(sign: int) -> np.ndarray:
    G = np.empty((4, 4, 4), dtype=complex)
    for e, b, g in itertools.product(range(4), repeat=3):
        G[e, b, g] = _gamma(e, b, g, sign)
    return G


def _star(F: np.ndarray, G: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    # both integrals carry the lattice measure 1/2 sum
    return 0.25 * np.einsum("ebg,b,g->e", tensor, F, G)


def _homomorphism_error(tensor: np.ndarray, s: float = 0.0) -> float:
    worst = 0.0
    for A, B in itertools.product(PAULIS, repeat=2):
        fa = discrete_symbol(A, s).values
        fb = discrete_symbol(B, s).values
        fab = discrete_symbol(A @ B, s, check_hermitian=False).values
        worst = max(worst, float(np.max(np.abs(_star(fa, fb, tensor) - fab))))
    return worst


def _select_sign() -> dict:
    errors = {sign: _homomorphism_error(_tensor(sign)) for sign in (1, -1)}
    sign = min(errors, key=errors.get)
    if errors[sign] > 1e-12:
        raise RuntimeError(f"no sign convention gives a star-product homomorphism: {errors}")
    return {
        "order": [(p.a1, p.a2) for p in LATTICE],
        "epsilon_0123": 1,
        "imaginary_sign": sign,
        "homomorphism_residual": errors[sign],
        "rejected_residual": errors[-sign],
    }


EPSILON_CONVENTION = _select_sign()
_GAMMA = _tensor(EPSILON_CONVENTION["imaginary_sign"])
_GAMMA.setflags(write=False)


def gamma_structure(eta: LatticePoint, beta: LatticePoint, gamma: LatticePoint) -> complex:
    return complex(_GAMMA[eta.index, beta.index, gamma.index])


def gamma_tensor() -> np.ndarray:
    return _GAMMA


def structure_tensor(s: float) -> np.ndarray:
    """``Tr[Delta^{-s}(beta) Delta^{-s}(gamma) Delta^s(eta)]`` indexed ``[eta, beta, gamma]``.

    Equals :func:`gamma_tensor` at ``s = 0`` and makes the star product an
    exact image of the operator product at any ``s``.
    """
    Ks, Km = _kernels(s), _kernels(-s)
    return np.einsum("bij,gjk,eki->ebg", Km, Km, Ks)


def discrete_star(F: DiscreteSymbol, G: DiscreteSymbol, structure: str = "wootters") -> DiscreteSymbol:
    """Lattice star product.

    ``structure="wootters"`` uses the fixed structure function
    :func:`gamma_structure`; ``structure="kernel"`` uses
    :func:`structure_tensor` at the symbols' ``s``.
    """
    if F.s != G.s:
        raise ValueError("star product needs symbols of the same phase space")
    tensor = _GAMMA if structure == "wootters" else structure_tensor(F.s)
    return DiscreteSymbol(_star(F.values, G.values, tensor), F.s)


def discrete_bracket(F: DiscreteSymbol, G: DiscreteSymbol, hbar: float = 1.0, structure: str = "wootters") -> DiscreteSymbol:
    fg = discrete_star(F, G, structure).values
    gf = discrete_star(G, F, structure).values
    return DiscreteSymbol((fg - gf) / (1j * hbar), F.s)


def discrete_chi(rho, s: float) -> float:
    F = discrete_symbol(rho, s).values
    return math.sqrt(0.5 * float(np.sum(F * F)))


def discrete_v_qsl(rho, H, s: float, hbar: float = 1.0) -> float:
    """``sqrt(1/2 sum |{{F_rho, F_H}}|^2)`` with the s-consistent structure tensor."""
    Fr = discrete_symbol(rho, s)
    Fh = discrete_symbol(H, s)
    br = discrete_bracket(Fr, Fh, hbar, structure="kernel").values
    return math.sqrt(0.5 * float(np.sum(np.abs(br) ** 2)))


def homomorphism_residual(s: float, structure: str = "wootters") -> float:
    """Largest ``|F_AB - F_A * F_B|`` over Pauli pairs; a report, not an assertion, for ``s != 0``."""
    tensor = _GAMMA if structure == "wootters" else structure_tensor(s)
    return _homomorphism_error(tensor, s)


def _random_hermitian2(rng):
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return 0.5 * (x + x.conj().T)


def verify_sw_criteria_discrete(s: float, trials: int = 20, seed: int = 3, tolerance: float = 1e-12, kernel=None) -> dict:
    """SW criteria with ``1/2 sum_eta`` in place of the integrals.

    Covariance is checked under the Pauli group, which permutes the four
    phase-point operators.
    """
    rng = np.random.default_rng(seed)
    kern = kernel or (lambda ss: _kernels(ss))
    Ks, Km = kern(s), kern(-s)
    res = dict.fromkeys(("SW-1", "SW-2", "SW-3", "SW-4", "SW-5"), 0.0)
    res["SW-2"] = float(np.max(np.abs(Ks - Ks.conj().transpose(0, 2, 1))))
    res["SW-3"] = float(np.max(np.abs(0.5 * Ks.sum(0) - _I)))

    perms = []
    for U in PAULIS[1:]:
        moved = np.einsum("ij,pjk,kl->pil", U, Ks, U.conj().T)
        dist = np.abs(moved[:, None] - Ks[None]).max(axis=(2, 3))
        perms.append((U, np.argmin(dist, axis=1), float(dist.min(axis=1).max())))

    for _ in range(trials):
        A, B = _random_hermitian2(rng), _random_hermitian2(rng)
        FA = np.einsum("ij,pji->p", A, Ks)
        FBm = np.einsum("ij,pji->p", B, Km)
        res["SW-2"] = max(res["SW-2"], float(np.max(np.abs(FA.imag))))
        rec = 0.5 * np.einsum("p,pij->ij", FA, Km)
        res["SW-1"] = max(res["SW-1"], float(np.max(np.abs(rec - A))))
        res["SW-3"] = max(res["SW-3"], abs(0.5 * FA.sum() - np.trace(A)))
        res["SW-5"] = max(res["SW-5"], abs(0.5 * np.sum(FA * FBm) - np.trace(A @ B)))
        for U, perm, mismatch in perms:
            # U Delta(eta) U^dag = Delta(perm[eta])  =>  F_{U A U^dag}(perm[eta]) = F_A(eta)
            FU = np.einsum("ij,pji->p", U @ A @ U.conj().T, Ks)
            res["SW-4"] = max(res["SW-4"], mismatch, float(np.max(np.abs(FU[perm] - FA))))
    return {k: {"residual": float(v), "tolerance": tolerance, "pass": bool(v <= tolerance)} for k, v in res.items()}
