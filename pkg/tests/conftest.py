import functools

import pytest

from chaosqm.pendulum import PendulumParams, compute_basins

ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def basin_image(width, height, window=(-2.0, 2.0, -2.0, 2.0), workers=1):
    """Basin rasters are expensive; share them across test modules."""
    return compute_basins(PendulumParams(), width, height, window, workers=workers)


@pytest.fixture
def default_params():
    return PendulumParams()
