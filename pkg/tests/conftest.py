import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dnaineq.geometry import Polygon  # noqa: E402

LSHAPE = [(0, 0), (0, 60), (20, 60), (20, 20), (60, 20), (60, 0)]
PENTAGON = [(0, 0), (0, 30), (15, 10), (30, 30), (30, 0)]
HEX_SEPARABLE = [(0, 0), (5, 15), (0, 30), (30, 30), (25, 15), (30, 0)]
PENTAGON_SEPARABLE = [(0, 40), (0, 70), (15, 50), (30, 70), (30, 40)]
HEX_NONSEP_A = [(0, 0), (10, 15), (0, 30), (30, 30), (20, 15), (30, 0)]
HEX_NONSEP_B = [(0, 0), (0, 30), (10, 20), (20, 20), (30, 30), (30, 0)]
TRIANGLE = [(0, 1), (0, 0), (1, 0)]  # edge 2 is the hypotenuse


@pytest.fixture
def square():
    return Polygon.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def lshape():
    return Polygon.from_points(LSHAPE)


@pytest.fixture
def pentagon():
    return Polygon.from_points(PENTAGON)


@pytest.fixture
def right_triangle():
    return Polygon.from_points(TRIANGLE)


def rotate(points, angle, shift=(0.0, 0.0), scale=1.0):
    c, s = math.cos(angle), math.sin(angle)
    return [(scale * (c * x - s * y) + shift[0], scale * (s * x + c * y) + shift[1]) for x, y in points]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
