import numpy as np
import pytest

from radialbodies.geometry import ball, box, interval, polytope, random_polygon


@pytest.fixture
def square():
    return box([0, 0], [1, 1])


@pytest.fixture
def triangle():
    return polytope([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def segment():
    return interval(0, 1)


@pytest.fixture
def disk():
    return ball([0, 0], 1.0)


@pytest.fixture
def heptagon():
    return random_polygon(np.random.default_rng(3), 7)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
