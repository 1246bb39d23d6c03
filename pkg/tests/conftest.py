"""Shared fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from spinlab.hadamard import parse_angle
from spinlab.towers import build_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def grid_two_by_two():
    return build_grid("two_by_two", parse_angle("0"), parse_angle("1/3"), levels=4)


@pytest.fixture(scope="session")
def grid_four_generic():
    return build_grid("four_by_four", parse_angle("0"), parse_angle("1/5"), levels=3)


@pytest.fixture(scope="session")
def grid_four_order_four():
    return build_grid("four_by_four", parse_angle("0"), parse_angle("1/2"), levels=3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
