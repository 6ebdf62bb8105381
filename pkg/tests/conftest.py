import numpy as np
import pytest

from patrolsim.world import build_grid_map


@pytest.fixture(scope="session")
def gmap20():
    return build_grid_map(20, 20, 30.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
