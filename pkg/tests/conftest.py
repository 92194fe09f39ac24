import numpy as np
import pytest

from phaseqsl.sun_algebra import build_basis
from phaseqsl.sun_phase_space import build_measure


@pytest.fixture(scope="session")
def su2():
    return build_basis(2)


@pytest.fixture(scope="session")
def su3():
    return build_basis(3)


@pytest.fixture(scope="session")
def sphere(su2):
    return build_measure(2, resolution=(16, 32), basis=su2)


@pytest.fixture(scope="session")
def sphere_fine(su2):
    return build_measure(2, resolution=(32, 64), basis=su2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def qubit_state(x):
    psi = np.array([np.cos(x), np.sin(x)], dtype=complex)
    return np.outer(psi, psi.conj())


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
