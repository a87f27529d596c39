import math

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

# pass/fail lines printed by the acceptance module, echoed at session end
ACCEPTANCE_LINES: list[str] = []


def brute_force_tn(residuals, delta, lam, t_last=500):
    """Characteristic-function distance summed term by term, no tail cut."""
    theta = np.asarray(residuals, dtype=float)
    n = theta.size
    total = 0.0
    log_w = -lam  # log Poisson pmf at t = 0
    for t in range(t_last + 1):
        if t > 0:
            log_w += math.log(lam) - math.log(t)
        ecf = complex(np.mean(np.cos(t * theta)), np.mean(np.sin(t * theta)))
        total += abs(ecf - delta**t) ** 2 * math.exp(log_w)
    return n * total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
