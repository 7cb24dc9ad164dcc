"""
Tests for OfdmConfig and the error hierarchy
"""

import pytest

from jscc_sim.core.errors import ConfigError, FeatureFormatError, FormatError, InvalidArgumentError, JsccSimError
from jscc_sim.core.types import OfdmConfig


class TestOfdmConfigDefaults:
    """Test the default WLAN plan"""

    def test_counts(self, wlan_config):
        """48 data, 4 pilots, 12 unused"""
        assert wlan_config.n_subcarriers == 64
        assert wlan_config.n_data == 48
        assert wlan_config.n_pilots == 4
        assert wlan_config.n_unused == 12

    def test_partition(self, wlan_config):
        """Data and pilot bins are disjoint and exclude DC"""
        used = set(wlan_config.data_indices) | set(wlan_config.pilot_indices)
        assert len(used) == 52
        assert 0 not in used
        assert set(wlan_config.pilot_indices) == {7, 21, 43, 57}

    def test_timing(self, wlan_config):
        """(K + L) / B per symbol, two-symbol preamble"""
        assert wlan_config.symbol_length == 80
        assert wlan_config.symbol_duration == pytest.approx(8e-6)
        assert wlan_config.preamble_duration == pytest.approx(16e-6)
        assert wlan_config.subcarrier_spacing == pytest.approx(156250.0)

    def test_frequency_index(self, wlan_config):
        """Bins at or above K/2 are negative frequencies"""
        assert wlan_config.frequency_index(1) == 1
        assert wlan_config.frequency_index(31) == 31
        assert wlan_config.frequency_index(32) == -32
        assert wlan_config.frequency_index(63) == -1

    def test_wlan_default_matches_constructor(self):
        """wlan_default is the plain default"""
        assert OfdmConfig.wlan_default() == OfdmConfig()


class TestOfdmConfigValidation:
    """Test configuration errors"""

    @pytest.mark.parametrize("cp_length", [0, 64, 80])
    def test_cp_length_bounds(self, cp_length):
        """0 < L < K"""
        with pytest.raises(ConfigError):
            OfdmConfig(cp_length=cp_length)

    def test_overlapping_indices(self):
        """A bin cannot be data and pilot"""
        with pytest.raises(ConfigError):
            OfdmConfig(n_subcarriers=8, cp_length=2, data_indices=(1, 2), pilot_indices=(2,),
                       pilot_values=(1,))

    def test_index_out_of_range(self):
        """Indices must lie in [0, K)"""
        with pytest.raises(ConfigError):
            OfdmConfig(n_subcarriers=8, cp_length=2, data_indices=(1, 8), pilot_indices=(),
                       pilot_values=())

    def test_pilot_value_count(self):
        """One value per pilot"""
        with pytest.raises(ConfigError):
            OfdmConfig(n_subcarriers=8, cp_length=2, data_indices=(1, 2), pilot_indices=(3,),
                       pilot_values=())

    def test_config_error_is_value_error(self):
        """Callers may catch ValueError"""
        with pytest.raises(ValueError):
            OfdmConfig(bandwidth=-1.0)


class TestOfdmConfigSerialization:
    """Test dict round trips and the digest"""

    def test_from_dict_pairs(self):
        """Pilot values accept [re, im] pairs and strings"""
        config = OfdmConfig.from_dict({
            "n_subcarriers": 8,
            "cp_length": 2,
            "data_indices": [1, 2, 3],
            "pilot_indices": [5, 6],
            "pilot_values": [[1, 0], "0-1j"],
        })
        assert config.pilot_values == (1 + 0j, -1j)
        assert config.data_indices == (1, 2, 3)

    @pytest.mark.parametrize("data", [
        {"n_subcarriers": 128},
        {"n_subcarriers": 128, "data_indices": [1, 2, 3]},
        {"n_subcarriers": 32, "pilot_indices": [], "pilot_values": []},
    ])
    def test_from_dict_needs_plan_off_64(self, data):
        """Only K=64 falls back to the WLAN subcarrier plan"""
        with pytest.raises(ConfigError, match="subcarrier plan"):
            OfdmConfig.from_dict(data)

    def test_from_dict_bare_64(self):
        assert OfdmConfig.from_dict({"n_subcarriers": 64}) == OfdmConfig()

    def test_from_dict_full_plan_off_64(self):
        config = OfdmConfig.from_dict({"n_subcarriers": 128, "cp_length": 32, "data_indices": [1, 2, 3],
                                       "pilot_indices": [], "pilot_values": []})
        assert config.n_data == 3
        assert config.n_pilots == 0

    def test_from_dict_unknown_key(self):
        """Unknown keys are rejected"""
        with pytest.raises(ConfigError):
            OfdmConfig.from_dict({"subcarriers": 64})

    def test_to_dict_round_trip(self, small_config):
        """to_dict feeds back into from_dict"""
        assert OfdmConfig.from_dict(small_config.to_dict()) == small_config

    def test_digest_stable(self, small_config):
        """Same plan, same digest; different plan, different digest"""
        assert small_config.config_digest() == OfdmConfig.from_dict(small_config.to_dict()).config_digest()
        assert len(small_config.config_digest()) == 16
        assert small_config.config_digest() != OfdmConfig().config_digest()


class TestErrors:
    """Test the exception hierarchy"""

    def test_hierarchy(self):
        """Every error derives from JsccSimError"""
        assert issubclass(InvalidArgumentError, JsccSimError)
        assert issubclass(FeatureFormatError, FormatError)
        assert issubclass(FormatError, JsccSimError)
