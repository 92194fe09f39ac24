import itertools
import math

import numpy as np
import pytest

from phaseqsl import discrete as d
from phaseqsl.exceptions import NotHermitianError
from phaseqsl.sun_algebra import build_basis, decompose, random_density_matrix, random_hermitian
from phaseqsl.sun_phase_space import chi_sun, v_qsl_sun

from conftest import SIGMA_X, SIGMA_Y, SIGMA_Z, qubit_state


def wootters_reference(a1, a2):
    """Phase-point operators of the 2x2 lattice, typed in from their textbook form."""
    return 0.5 * (np.eye(2) + (-1) ** a1 * SIGMA_Z + (-1) ** a2 * SIGMA_X + (-1) ** (a1 + a2) * SIGMA_Y)


def random_symbol_pair(rng, s):
    A, B = random_hermitian(2, rng), random_hermitian(2, rng)
    return A, B, d.discrete_symbol(A, s), d.discrete_symbol(B, s)


def test_lattice_order():
    assert [p.index for p in d.LATTICE] == [0, 1, 2, 3]


def test_kernel_at_zero_is_wootters():
    for p in d.LATTICE:
        assert np.allclose(d.wootters_kernel(p, 0.0), wootters_reference(p.a1, p.a2))
    assert np.allclose(d.wootters_kernel(d.LatticePoint(0, 0), 0.0), 0.5 * (np.eye(2) + SIGMA_X + SIGMA_Y + SIGMA_Z))


@pytest.mark.parametrize("s", [-2.0, -1.0, 0.0, 0.5, 1.0])
def test_kernel_trace_and_standardization(s):
    K = np.array([d.wootters_kernel(p, s) for p in d.LATTICE])
    assert np.allclose(np.einsum("pii->p", K), 1.0)
    assert np.allclose(0.5 * K.sum(axis=0), np.eye(2))


@pytest.mark.parametrize("s", [-1.0, 0.3, 1.0])
def test_kernel_matches_continuous_kernel_on_tetrahedron(s):
    """Lattice kernels are continuous kernels at the tetrahedron of Bloch directions."""
    from phaseqsl.sun_phase_space import kernel_batch

    su2 = build_basis(2)
    for p in d.LATTICE:
        n = np.array([(-1) ** p.a2, (-1) ** (p.a1 + p.a2), (-1) ** p.a1]) / math.sqrt(3)
        assert np.allclose(d.wootters_kernel(p, s), kernel_batch(0.5 * n[None], s, su2)[0])


def test_symbol_examples():
    assert np.allclose(d.discrete_symbol(0.5 * np.eye(2), 0.4).values, 0.5)
    F = d.discrete_symbol(np.diag([1.0, 0.0]), 0.0)
    assert np.allclose(F.values, [1, 1, 0, 0])
    assert F.total() == pytest.approx(1.0)  # half-sum measure gives Tr A


def test_symbol_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        d.discrete_symbol(np.array([[0, 1], [0, 0]]), 0.0)
    assert np.iscomplexobj(d.discrete_symbol(np.array([[0, 1], [0, 0]]), 0.0, check_hermitian=False).values)


@pytest.mark.parametrize("s", [-1.5, 0.0, 0.7])
def test_tracing_property(rng, s):
    A, B = random_hermitian(2, rng), random_hermitian(2, rng)
    Fa, Fb = d.discrete_symbol(A, s).values, d.discrete_symbol(B, -s).values
    assert 0.5 * np.dot(Fa, Fb) == pytest.approx(np.trace(A @ B).real, abs=1e-12)


def test_levi_civita4():
    assert d.levi_civita4(0, 1, 2, 3) == 1
    assert d.levi_civita4(1, 0, 2, 3) == -1
    assert d.levi_civita4(0, 0, 2, 3) == 0
    for p in itertools.permutations(range(4)):
        assert d.levi_civita4(*p) == round(np.linalg.det(np.eye(4)[list(p)]))


def test_gamma_examples():
    P = d.LATTICE
    for p in P:
        assert d.gamma_structure(p, p, p) == pytest.approx(2.5)
    for e, b, g in itertools.permutations(P, 3):
        val = d.gamma_structure(e, b, g)
        assert val.real == pytest.approx(-0.5)
        assert abs(val.imag) == pytest.approx(1.0)


def test_gamma_is_kernel_triple_trace_at_zero():
    assert np.allclose(d.gamma_tensor(), d.structure_tensor(0.0), atol=1e-14)
    K = [wootters_reference(p.a1, p.a2) for p in d.LATTICE]
    T = np.array([[[np.trace(K[b] @ K[g] @ K[e]) for g in range(4)] for b in range(4)] for e in range(4)])
    assert np.allclose(d.gamma_tensor(), T)


def test_epsilon_convention_recorded():
    conv = d.EPSILON_CONVENTION
    assert conv["homomorphism_residual"] <= 1e-12
    assert conv["rejected_residual"] > 1


@pytest.mark.parametrize("structure", ["wootters", "kernel"])
def test_star_is_operator_product_at_zero(rng, structure):
    A, B, Fa, Fb = random_symbol_pair(rng, 0.0)
    prod = d.discrete_star(Fa, Fb, structure=structure).values
    assert np.allclose(prod, d.discrete_symbol(A @ B, 0.0, check_hermitian=False).values, atol=1e-12)


@pytest.mark.parametrize("s", [-1.0, 0.5, 1.0])
def test_kernel_star_is_operator_product(rng, s):
    A, B, Fa, Fb = random_symbol_pair(rng, s)
    prod = d.discrete_star(Fa, Fb, structure="kernel").values
    assert np.allclose(prod, d.discrete_symbol(A @ B, s, check_hermitian=False).values, atol=1e-12)
    assert d.homomorphism_residual(s, "kernel") <= 1e-12


def test_wootters_structure_only_homomorphic_at_zero():
    assert d.homomorphism_residual(0.0, "wootters") <= 1e-12
    assert d.homomorphism_residual(-1.0, "wootters") > 0.1


def test_star_examples():
    one = d.discrete_symbol(np.eye(2), 0.0)
    G = d.discrete_symbol(SIGMA_Z + 0.3 * SIGMA_X, 0.0)
    assert np.allclose(d.discrete_star(one, G).values, G.values)
    sx, sy = d.discrete_symbol(SIGMA_X, 0.0), d.discrete_symbol(SIGMA_Y, 0.0)
    ref = d.discrete_symbol(1j * SIGMA_Z, 0.0, check_hermitian=False).values
    assert np.allclose(d.discrete_star(sx, sy).values, ref)


def test_bracket_of_commuting_operators_vanishes():
    A = d.discrete_symbol(SIGMA_Z, 0.0)
    B = d.discrete_symbol(np.diag([0.2, 0.7]), 0.0)
    assert np.allclose(d.discrete_bracket(A, B).values, 0.0, atol=1e-14)


def test_chi_and_v_examples():
    assert d.discrete_chi(qubit_state(0.3), 0.0) == pytest.approx(1.0)
    H = 0.5 * SIGMA_Z
    assert d.discrete_v_qsl(np.diag([1.0, 0.0]), H, 0.4) == pytest.approx(0.0, abs=1e-14)
    assert d.discrete_v_qsl(qubit_state(math.pi / 4), H, 0.0) == pytest.approx(math.sqrt(2) / 2)


def test_agreement_with_qubit_closed_forms(rng):
    su2 = build_basis(2)
    for _ in range(20):
        rho, H = random_density_matrix(2, rng), random_hermitian(2, rng)
        s = rng.uniform(-3, 3)
        b, h = decompose(rho, su2).vector, decompose(H, su2).vector
        assert d.discrete_chi(rho, s) == pytest.approx(chi_sun(b, s, 2), abs=1e-10)
        assert d.discrete_v_qsl(rho, H, s) == pytest.approx(v_qsl_sun(h, b, s, 2, su2), abs=1e-10)


@pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
def test_sw_criteria(s):
    rep = d.verify_sw_criteria_discrete(s)
    assert set(rep) == {f"SW-{k}" for k in range(1, 6)}
    assert all(r["pass"] for r in rep.values()), rep
