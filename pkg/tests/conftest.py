import numpy as np
import pytest

from mubtomo.mub import build_mub


@pytest.fixture(scope="session")
def mub3():
    return build_mub(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
