import numpy as np
import pytest

from gpilab import DistributionFamily, PovertyLine, TimeGrid


@pytest.fixture
def uniform_family():
    return DistributionFamily.uniform(1.0)


@pytest.fixture
def lognormal_family():
    return DistributionFamily.lognormal(0.0, 1.0)


@pytest.fixture
def pareto_family():
    return DistributionFamily.pareto(1.0, 2.0)


@pytest.fixture
def line_half():
    return PovertyLine.constant(0.5)


@pytest.fixture
def grid2():
    return TimeGrid.from_points([0.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
