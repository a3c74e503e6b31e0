import numpy as np
import pytest

from mixprod import MixtureModel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_component():
    """Small reference model used across several modules."""
    return MixtureModel([0.3, 0.7], [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7]])
