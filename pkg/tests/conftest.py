"""Test configuration and fixtures"""

import numpy as np
import pytest

from jscc_sim.core.types import OfdmConfig
from jscc_sim.features.source import FeatureSpec, generate_features


@pytest.fixture
def wlan_config():
    """Default 64-subcarrier plan: 48 data, 4 pilots, L=16, 10 MHz"""
    return OfdmConfig()


@pytest.fixture
def small_config():
    """16-subcarrier plan with 8 data bins and one pilot"""
    return OfdmConfig(
        n_subcarriers=16,
        cp_length=4,
        bandwidth=1e6,
        data_indices=tuple(range(1, 9)),
        pilot_indices=(12,),
        pilot_values=(1 + 0j,),
        preamble_repeats=2,
    )


@pytest.fixture
def rng():
    """Seeded generator for test data"""
    return np.random.default_rng(1234)


@pytest.fixture
def feature_block():
    """Small clipped synthetic block"""
    return generate_features(FeatureSpec(height=4, width=4, channels=3, rho=0.9, sigma=0.5), seed=7)


@pytest.fixture
def experiment_yaml(tmp_path):
    """Factory writing an experiment config and returning its path"""
    import yaml

    def _write(data, name="experiment.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data))
        return path

    return _write
