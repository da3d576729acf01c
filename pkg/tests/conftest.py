import numpy as np
import pytest

from superfluence import PulseSpec, Shape, SystemConfig, simulate

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def fig2_rect():
    return simulate(SystemConfig(10), PulseSpec(Shape.RECTANGULAR, 0.2))


@pytest.fixture(scope="session")
def fig2_sine():
    return simulate(SystemConfig(10), PulseSpec(Shape.SINE, 0.2))


@pytest.fixture(scope="session")
def quad_rect_01():
    """N=10 rectangular pi pulse, gamma t_p = 0.1, with the two-time engine."""
    return simulate(SystemConfig(10), PulseSpec(Shape.RECTANGULAR, 0.1), quadratures=True)


@pytest.fixture(scope="session")
def quad_rect_03():
    return simulate(SystemConfig(10), PulseSpec(Shape.RECTANGULAR, 0.3), quadratures=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_state(rng, n):
    """Random Hermitian, positive, unit-trace (N+1)x(N+1) matrix."""
    a = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
