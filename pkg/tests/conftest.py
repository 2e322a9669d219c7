import numpy as np
import pytest

from iabsim import Region, ScenarioConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_region():
    return Region(radius=1000.0)


@pytest.fixture
def tiny_config():
    """Small, fast scenario used by pipeline-level tests."""
    return ScenarioConfig(
        realizations=3,
        master_seed=7,
        mbs_density=2.0,
        sbs_density=8.0,
        ue_density=40.0,
        wall_density=60.0,
        tree_density=30.0,
        tree_length=12.0,
        mu=0.3,
    )
