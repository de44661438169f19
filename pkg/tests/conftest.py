import warnings

import numpy as np
import pytest

from levyjacobi.config import standard_config, three_atom_config
from levyjacobi.instance import Instance
from levyjacobi.orthopoly import TruncationWarning


@pytest.fixture(scope="session")
def std():
    """Two-point nu~, w = (1/2, 1/2), letters phi = (1, -1), psi = (1, 1); N = 4."""
    return Instance(standard_config())


@pytest.fixture(scope="session")
def tri():
    """3-atom nu~, 3-point grid, three generic letters; N = 6."""
    return Instance(three_atom_config())


@pytest.fixture(scope="session")
def tri_small(tri):
    """Same instance truncated at N = 4 (cheaper Fock side)."""
    return tri.fields_for(4)


@pytest.fixture(autouse=True)
def _quiet_truncation():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
