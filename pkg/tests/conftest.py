import numpy as np
import pytest

from coupled_nls.model import ProblemParams, default_grid, make_grid
from coupled_nls.scalar import solve_scalar_ground_state

# lines collected by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def grid1():
    return default_grid(1)


@pytest.fixture(scope="session")
def small_grids():
    return {n: make_grid(n, 30.0 if n == 1 else 20.0, 1024) for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def u0_cubic(grid1):
    """Solved ground state for n = 1, q = 2 on the default grid."""
    return solve_scalar_ground_state(ProblemParams(1, 2.0, 0.0, 1.0), grid1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
