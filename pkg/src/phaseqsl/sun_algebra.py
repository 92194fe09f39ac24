"""SU(N) generators, structure constants and Bloch decompositions.

Generators follow the generalized Gell-Mann ordering: for each level
``k = 1 .. N-1`` the symmetric and antisymmetric off-diagonal pairs
``(j, k)`` with ``j < k`` come first, followed by the diagonal generator
built from the first ``k + 1`` levels.  For ``N = 3`` this reproduces the
textbook order of the eight Gell-Mann matrices, for ``N = 2`` it gives
``(sigma_x, sigma_y, sigma_z) / 2``.  All generators are normalized to
``Tr(T_a T_b) = delta_ab / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import InconsistencyError, InvalidDimensionError, NotHermitianError

__all__ = [
    "SUNBasis",
    "BlochDecomposition",
    "build_basis",
    "compute_structure_constants",
    "decompose",
    "reconstruct",
    "random_hermitian",
    "random_density_matrix",
]

DENSE_MAX_N = 4


@dataclass(frozen=True, eq=False)
class SUNBasis:
    N: int
    generators: np.ndarray  # shape (N**2 - 1, N, N)
    _f: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def structure_constants(self) -> np.ndarray:
        if self._f is not None:
            return self._f
        return _structure_constants_cached(self)


@lru_cache(maxsize=8)
def _structure_constants_cached(basis: SUNBasis) -> np.ndarray:
    return compute_structure_constants(basis)


@dataclass(frozen=True)
class BlochDecomposition:
    """``matrix = trace_part * 1 + vector . T``."""

    trace_part: float
    vector: np.ndarray

    def reconstruct(self, basis: SUNBasis) -> np.ndarray:
        return reconstruct(self, basis)


def _gell_mann(N: int) -> np.ndarray:
    mats = []
    for k in range(1, N):
        for j in range(k):
            sym = np.zeros((N, N), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            asym = np.zeros((N, N), dtype=complex)
            asym[j, k] = -1j
            asym[k, j] = 1j
            mats.extend([sym, asym])
        diag = np.zeros(N)
        diag[:k] = 1.0
        diag[k] = -k
        mats.append(np.diag(diag * np.sqrt(2.0 / (k * (k + 1)))).astype(complex))
    return 0.5 * np.array(mats)


def build_basis(N: int) -> SUNBasis:
    """Return the generalized Gell-Mann basis of su(N).

    Raises :class:`InvalidDimensionError` for ``N < 2``.
    """
    if int(N) != N or N < 2:
        raise InvalidDimensionError(f"SU(N) basis needs an integer N >= 2, got {N!r}")
    N = int(N)
    gens = _gell_mann(N)
    gens.setflags(write=False)
    basis = SUNBasis(N, gens)
    if N <= DENSE_MAX_N:
        f = compute_structure_constants(basis)
        f.setflags(write=False)
        basis = SUNBasis(N, gens, f)
    return basis


def compute_structure_constants(basis: SUNBasis, atol: float = 1e-12) -> np.ndarray:
    """Brute-force ``f_abc = -2i Tr([T_a, T_b] T_c)``.

    The basis must be orthonormal in the ``Tr(T_a T_b) = delta_ab / 2`` sense,
    otherwise the trace formula does not recover the structure constants.
    """
    T = np.asarray(basis.generators)
    gram = np.einsum("aij,bji->ab", T, T)
    if np.max(np.abs(gram - 0.5 * np.eye(len(T)))) > atol:
        raise InconsistencyError("basis is not orthonormal under Tr(T_a T_b) = delta_ab/2")
    prod = np.einsum("aij,bjk->abik", T, T)
    comm = prod - prod.transpose(1, 0, 2, 3)
    tr = np.einsum("abij,cji->abc", comm, T)
    f = -2j * tr
    if np.max(np.abs(f.imag)) > atol:
        raise InconsistencyError("structure constants have an imaginary residue")
    return np.ascontiguousarray(f.real)


def _check_hermitian(matrix: np.ndarray, atol: float) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > atol:
        raise NotHermitianError("matrix is not Hermitian")
    return m


def decompose(matrix, basis: SUNBasis, atol: float = 1e-10) -> BlochDecomposition:
    """Expand a Hermitian matrix as ``c * 1 + v_a T_a``.

    ``c = Tr(M) / N`` and ``v_a = 2 Tr(M T_a)``.  For a density matrix ``v`` is
    the Bloch vector, for a Hamiltonian ``(c, v) = (h0, h)``.
    """
    m = _check_hermitian(matrix, atol)
    if m.shape[0] != basis.N:
        raise InconsistencyError(f"matrix is {m.shape[0]}x{m.shape[0]}, basis has N={basis.N}")
    trace_part = float(np.trace(m).real) / basis.N
    vector = 2.0 * np.einsum("ij,aji->a", m, basis.generators).real
    return BlochDecomposition(trace_part, vector)


def reconstruct(dec: BlochDecomposition, basis: SUNBasis) -> np.ndarray:
    return dec.trace_part * np.eye(basis.N) + np.einsum("a,aij->ij", dec.vector, basis.generators)


def random_hermitian(N: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """GUE-style Hermitian matrix with Gaussian entries."""
    x = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    return scale * 0.5 * (x + x.conj().T)


def random_density_matrix(N: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre matrix of the given rank (full rank by default).

    ``rank=1`` yields a Haar-random pure state.
    """
    rank = N if rank is None else rank
    g = rng.normal(size=(N, rank)) + 1j * rng.normal(size=(N, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
