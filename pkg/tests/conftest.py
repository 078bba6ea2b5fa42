import numpy as np
import pytest

from steinlab.special import stable_density_1d


@pytest.fixture(scope="session")
def density15():
    return stable_density_1d(1.5)


@pytest.fixture(scope="session")
def density13():
    return stable_density_1d(1.3)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240)
