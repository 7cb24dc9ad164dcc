"""
Tests for covariance estimation and the banded channel covariance
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from jscc_sim.core.errors import DegenerateCovarianceError, InsufficientDataError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.precoder.covariance import (
    PSEUDO,
    SymbolCovariance,
    banded_channel_covariance,
    estimate_symbol_covariance,
)


class TestEstimateSymbolCovariance:
    """Test the sample covariance"""

    def test_iid_symbols(self, rng):
        """Unit-power i.i.d. symbols give the identity"""
        x = (rng.standard_normal((100_000, 4)) + 1j * rng.standard_normal((100_000, 4))) / np.sqrt(2)
        cov = estimate_symbol_covariance(x)
        assert np.max(np.abs(cov.matrix - np.eye(4))) < 0.02
        assert cov.sample_count == 100_000

    def test_repeated_segment(self):
        """Mean removal leaves nothing"""
        x = np.tile(np.array([1 + 1j, 2, -1j]), (5, 1))
        assert_allclose(estimate_symbol_covariance(x).matrix, np.zeros((3, 3)), atol=1e-15)

    def test_hermitian_psd(self, rng):
        x = rng.standard_normal((20, 6)) + 1j * rng.standard_normal((20, 6))
        cov = estimate_symbol_covariance(x)
        assert_allclose(cov.matrix, cov.matrix.conj().T)
        assert cov.is_psd()

    def test_pseudo_symmetric(self, rng):
        x = rng.standard_normal((50, 3)) + 1j * rng.standard_normal((50, 3))
        pseudo = estimate_symbol_covariance(x).correlation_source(PSEUDO)
        assert_allclose(pseudo, pseudo.T)

    def test_too_few_segments(self):
        with pytest.raises(InsufficientDataError):
            estimate_symbol_covariance(np.ones((1, 4), dtype=complex))

    def test_wrong_rank(self):
        with pytest.raises(InvalidArgumentError):
            estimate_symbol_covariance(np.ones(4, dtype=complex))


class TestSymbolCovariance:
    """Test the covariance container"""

    def test_not_hermitian(self):
        with pytest.raises(DegenerateCovarianceError):
            SymbolCovariance(np.array([[1, 0.5], [0.2, 1]]))

    def test_not_square(self):
        with pytest.raises(InvalidArgumentError):
            SymbolCovariance(np.ones((2, 3)))

    def test_indefinite(self):
        assert not SymbolCovariance(np.array([[1.0, 0.0], [0.0, -1.0]])).is_psd()

    def test_missing_pseudo(self):
        with pytest.raises(InvalidArgumentError):
            SymbolCovariance(np.eye(2)).correlation_source(PSEUDO)

    def test_unknown_form(self):
        with pytest.raises(InvalidArgumentError):
            SymbolCovariance(np.eye(2)).correlation_source("transpose")


class TestBandedChannelCovariance:
    """Test the coherence mask"""

    def test_unit_coherence(self, wlan_config):
        assert_array_equal(banded_channel_covariance(wlan_config, 1).matrix, np.eye(48))

    def test_full_coherence(self, wlan_config):
        assert_array_equal(banded_channel_covariance(wlan_config, 64).matrix, np.ones((48, 48)))

    def test_tridiagonal(self):
        """Contiguous K_d = 4 with K_c = 2"""
        config = OfdmConfig(n_subcarriers=16, cp_length=4, data_indices=(1, 2, 3, 4),
                            pilot_indices=(5,), pilot_values=(1,))
        expected = np.eye(4) + np.eye(4, k=1) + np.eye(4, k=-1)
        assert_array_equal(banded_channel_covariance(config, 2).matrix, expected)

    def test_no_wraparound(self, wlan_config):
        """Band edges -26 and 26 are far apart, -1 and 1 are neighbours at K_c = 3"""
        cov = banded_channel_covariance(wlan_config, 3).matrix
        data = list(wlan_config.data_indices)
        assert cov[data.index(1), data.index(63)] == 1.0
        assert cov[data.index(26), data.index(38)] == 0.0

    def test_symmetric_unit_diagonal(self, wlan_config):
        cov = banded_channel_covariance(wlan_config, 5).matrix
        assert_array_equal(cov, cov.T)
        assert np.all(np.diag(cov) == 1.0)

    @pytest.mark.parametrize("coherence", [0, 65])
    def test_out_of_range(self, wlan_config, coherence):
        with pytest.raises(InvalidArgumentError):
            banded_channel_covariance(wlan_config, coherence)
