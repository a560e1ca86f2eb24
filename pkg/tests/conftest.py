import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bsppa import make_poisson_instance


@pytest.fixture(scope="session")
def poisson_small():
    """n=12, d=6 interpolation instance shared by cheap tests."""
    return make_poisson_instance(12, 6, "interpolation", seed=12)


@pytest.fixture(scope="session")
def poisson_diag16():
    return make_poisson_instance(16, 16, "diagonal", seed=16)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
