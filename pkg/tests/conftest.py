import numpy as np
import pytest

from src.models.schemas import ScenarioConfig


@pytest.fixture
def default_config():
    """The default simulation scenario (N = 4, 20 dBm, -80 dBm noise, eps = 0.2)."""
    return ScenarioConfig()


@pytest.fixture
def small_config():
    """Two antennas and a short AO budget so solver-heavy tests stay quick."""
    return ScenarioConfig(n_antennas=2, max_rounds=10)


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)
