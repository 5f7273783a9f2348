import numpy as np
import pytest

from slowdisc import LogRadialGrid, PerturbationSolution, PowerLawFlow


@pytest.fixture(scope="session")
def flow_half():
    return PowerLawFlow(1.0, 0.5)


@pytest.fixture(scope="session")
def flow_solid():
    return PowerLawFlow(1.0, 2.0)


@pytest.fixture(scope="session")
def field_grid():
    return LogRadialGrid(n=128, r_min=1e-3)


@pytest.fixture(scope="session")
def solution_half(flow_half, field_grid):
    return PerturbationSolution.compute(flow_half, [2, 3], grid=field_grid)


@pytest.fixture(scope="session")
def r_report(field_grid):
    return np.geomspace(1e-3, 1.0, 400)
