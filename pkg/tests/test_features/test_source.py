"""
Tests for the synthetic feature source
"""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from jscc_sim.core.errors import FeatureRangeError, InvalidArgumentError, UndefinedCorrelationError
from jscc_sim.features.source import (
    FeatureBlock,
    FeatureSpec,
    clip_activation,
    empirical_feature_correlation,
    flatten_channel_major,
    generate_features,
    generate_raw_features,
    lag_correlation,
    quantize_half,
    unflatten_channel_major,
)


class TestClipActivation:
    """Test the clip activation"""

    @pytest.mark.parametrize("value,expected", [(0.3, 0.3), (1.5, 1.0), (-2.0, -1.0), (1.0, 1.0)])
    def test_scalars(self, value, expected):
        assert clip_activation(value) == expected

    def test_array(self):
        assert_array_equal(clip_activation(np.array([-3.0, 0.0, 3.0])), [-1.0, 0.0, 1.0])

    def test_nan(self):
        """NaN is rejected"""
        with pytest.raises(InvalidArgumentError):
            clip_activation(float("nan"))


class TestFeatureSpec:
    """Test FeatureSpec validation"""

    @pytest.mark.parametrize("kwargs", [
        {"height": 0, "width": 4, "channels": 1},
        {"height": 4, "width": 4, "channels": 1, "rho": 1.0},
        {"height": 4, "width": 4, "channels": 1, "rho": -0.1},
        {"height": 4, "width": 4, "channels": 1, "sigma": 0.0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            FeatureSpec(**kwargs)


class TestGenerateFeatures:
    """Test the AR(1) generator"""

    def test_shape_and_range(self):
        block = generate_features(FeatureSpec(height=8, width=6, channels=5), seed=1)
        assert block.data.shape == (8, 6, 5)
        assert np.max(np.abs(block.data)) <= 1.0
        block.check_range()

    def test_deterministic(self):
        """Same FeatureSpec and seed give bit-identical tensors"""
        spec = FeatureSpec(height=8, width=8, channels=2)
        assert_array_equal(generate_features(spec, 3).data, generate_features(spec, 3).data)
        assert not np.array_equal(generate_features(spec, 3).data, generate_features(spec, 4).data)

    @pytest.mark.slow
    def test_independent_source(self):
        """rho = 0 gives lag-1 correlation near zero"""
        raw = generate_raw_features(FeatureSpec(height=400, width=400, channels=1, rho=0.0), seed=2)
        assert abs(lag_correlation(raw[:, :, 0].reshape(-1), 1)[1]) < 0.02

    @pytest.mark.slow
    def test_ar1_autocorrelation(self):
        """Pre-clip lag-d correlation follows rho^d"""
        raw = generate_raw_features(FeatureSpec(height=400, width=400, channels=1, rho=0.9, sigma=0.5), seed=3)
        lags = lag_correlation(raw[:, :, 0].reshape(-1), 10)
        for d in range(11):
            assert lags[d] == pytest.approx(0.9 ** d, abs=0.03)

    def test_marginal_std(self):
        """Stationary start: every sample has std sigma"""
        raw = generate_raw_features(FeatureSpec(height=100, width=100, channels=4, rho=0.5, sigma=0.5), seed=4)
        assert np.std(raw) == pytest.approx(0.5, rel=0.05)


class TestQuantizeHalf:
    """Test half-precision rounding"""

    def test_exact_values(self):
        block = FeatureBlock(np.array([0.5, 0.1, -1.0]).reshape(1, 3, 1))
        q = quantize_half(block)
        assert q.data[0, 0, 0] == 0.5
        assert q.data[0, 1, 0] == 0.0999755859375
        assert q.data[0, 2, 0] == -1.0

    def test_idempotent(self, feature_block):
        once = quantize_half(feature_block)
        assert_array_equal(quantize_half(once).data, once.data)

    def test_error_bound(self, feature_block):
        """No value moves by more than 2^-11"""
        q = quantize_half(feature_block)
        assert np.max(np.abs(q.data - feature_block.data)) <= 2.0 ** -11


class TestFlattening:
    """Test channel-major ordering"""

    def test_order(self):
        """Channel 0 first, row-major inside a channel"""
        data = np.arange(12, dtype=float).reshape(2, 3, 2)
        flat = flatten_channel_major(FeatureBlock(data))
        assert_array_equal(flat[:6], data[:, :, 0].reshape(-1))
        assert_array_equal(flat[6:], data[:, :, 1].reshape(-1))

    def test_round_trip(self, feature_block):
        flat = flatten_channel_major(feature_block)
        restored = unflatten_channel_major(flat, feature_block.height, feature_block.width,
                                           feature_block.num_channels)
        assert_array_equal(restored.data, feature_block.data)

    def test_size_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            unflatten_channel_major(np.zeros(5), 2, 2, 1)


class TestFeatureCorrelation:
    """Test empirical correlation over distance"""

    def test_lag_zero(self, feature_block):
        """Self-correlation is exactly 1"""
        assert empirical_feature_correlation(feature_block, 3)[0] == 1.0

    def test_constant_sequence(self):
        """Zero variance is undefined"""
        with pytest.raises(UndefinedCorrelationError):
            lag_correlation(np.ones(10), 2)

    def test_distance_too_large(self):
        with pytest.raises(InvalidArgumentError):
            lag_correlation(np.arange(4.0), 4)

    def test_clipped_source(self):
        """rho = 0.9 clipped source keeps lag-1 correlation near 0.88"""
        block = generate_features(FeatureSpec(height=250, width=250, channels=4, rho=0.9, sigma=0.5), seed=5)
        assert empirical_feature_correlation(block, 1)[1] == pytest.approx(0.88, abs=0.03)


class TestFeatureBlock:
    """Test the tensor container"""

    def test_dimensions(self, feature_block):
        assert (feature_block.height, feature_block.width, feature_block.num_channels) == (4, 4, 3)
        assert feature_block.num_elements == 48

    def test_rejects_2d(self):
        with pytest.raises(InvalidArgumentError):
            FeatureBlock(np.zeros((3, 3)))

    def test_range_check(self):
        with pytest.raises(FeatureRangeError):
            FeatureBlock(np.full((1, 1, 1), 1.25)).check_range()
