import numpy as np
import pytest

from invdet.matcore import random_gated

ACCEPTANCE_LINES = []


def gated_sample(rng, k, frac_hi=0.9):
    """``1 + M`` with ``||M|| = f / k``, ``f`` uniform on ``(0, frac_hi]``."""
    return random_gated(rng, k, frac_hi * (1.0 - rng.random()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
