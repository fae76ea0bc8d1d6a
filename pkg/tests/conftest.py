import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from recombination import DiscreteMeasure

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def gaussian_measure(N, n, seed, weighted=True):
    rng = np.random.default_rng(seed)
    points = rng.standard_normal((N, n))
    masses = rng.exponential(size=N) if weighted else np.ones(N)
    return DiscreteMeasure.from_masses(points, masses)


@pytest.fixture
def triangle():
    return DiscreteMeasure.uniform([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
