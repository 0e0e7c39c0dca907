import numpy as np
import pytest

from qcorr.states import DensityMatrix, bell_state, paper_example_state


@pytest.fixture
def bell():
    return bell_state().density()


@pytest.fixture
def paper():
    return paper_example_state()


@pytest.fixture
def product():
    rho_a = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    rho_b = np.array([[0.4, 0.1j], [-0.1j, 0.6]])
    return DensityMatrix(np.kron(rho_a, rho_b), (2, 2)), rho_a, rho_b


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return z + z.conj().T


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
