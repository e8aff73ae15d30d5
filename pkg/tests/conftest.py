import numpy as np
import pytest

from ppcurve.rng import SubstreamFactory


@pytest.fixture
def rng():
    """Fixed generator for reproducible tests."""
    return np.random.default_rng(42)


@pytest.fixture
def streams():
    return SubstreamFactory(7, "tests")
