import numpy as np
import pytest

from lambertlab import FiniteMeasureSpace, Partition

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def three_points():
    """Weights (1, 1, 2) with blocks {0, 1} and {2}."""
    return FiniteMeasureSpace.from_weights([1.0, 1.0, 2.0]), Partition([[0, 1], [2]])


def random_instance(rng, n_min=1, n_max=5):
    n = int(rng.integers(n_min, n_max + 1))
    sp = FiniteMeasureSpace.from_weights(rng.uniform(0.1, 3.0, n))
    part = Partition.from_labels(rng.integers(0, n, n))
    return sp, part


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
