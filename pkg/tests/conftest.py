import numpy as np
import pytest
from hypothesis import strategies as st

from cvdistill import gaussian as g


def tmsv_cov(r):
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    return np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])


def thermal(n_modes, nu=1.0):
    return nu * np.eye(2 * n_modes)


@st.composite
def covariances(draw, min_modes=1, max_modes=3, max_squeeze=0.5):
    n = draw(st.integers(min_modes, max_modes))
    seed = draw(st.integers(0, 2**32 - 1))
    return g.random_covariance(n, np.random.default_rng(seed), max_squeeze=max_squeeze)


@pytest.fixture(scope="session")
def headline_state():
    """Unbiased 3-mode state at r2 = 0.05 (before local squeezing)."""
    return g.symmetric_state(g.StateFamilyParams.unbiased(3, 0.05))


@pytest.fixture(scope="session")
def squeezed_headline_state(headline_state):
    return g.apply_symplectic(headline_state, g.local_squeezers([0.07] * 3))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
