"""
Tests for the precoder optimizer, precoding application and persistence
"""

import time

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import toeplitz

from jscc_sim.core.dft import random_unitary
from jscc_sim.core.errors import (
    ConfigHashMismatchError,
    DegenerateCovarianceError,
    FormatError,
    InvalidArgumentError,
    InvalidPrecoderError,
)
from jscc_sim.core.types import OfdmConfig
from jscc_sim.precoder.covariance import (
    PSEUDO,
    SymbolCovariance,
    banded_channel_covariance,
    estimate_symbol_covariance,
)
from jscc_sim.precoder.objective import PrecodingMatrix, normalized_omega, pilot_time_power, precoding_objective
from jscc_sim.precoder.optimizer import (
    apply_precoding,
    closest_unitary,
    invert_precoding,
    optimize_precoder,
)
from jscc_sim.precoder.storage import covariance_digest, load_precoder, save_precoder


@pytest.fixture
def ar1_covariance():
    """Toeplitz 0.9^|i-j| over 8 data subcarriers"""
    return SymbolCovariance(toeplitz(0.9 ** np.arange(8)).astype(complex))


@pytest.fixture
def tiny_config():
    """K_d = 3 plan for brute-force checks"""
    return OfdmConfig(n_subcarriers=8, cp_length=2, data_indices=(1, 2, 3), pilot_indices=(), pilot_values=())


class TestOptimizePrecoder:
    """Test the row-wise unitary optimizer"""

    def test_white_source(self, small_config):
        """Objective is V-invariant for C = I, omega = 0"""
        cov_h = banded_channel_covariance(small_config, 2)
        result = optimize_precoder(SymbolCovariance(np.eye(8)), cov_h, small_config, 1.0, np.zeros(16), 0.0,
                                   n_inits=2, max_sweeps=3, seed=4)
        assert result.objective_value == pytest.approx(8.0, abs=1e-6)

    def test_beats_identity(self, small_config, ar1_covariance):
        """Correlated source: optimized objective strictly below V = I (20.6)"""
        cov_h = banded_channel_covariance(small_config, 2)
        pilots = np.zeros(16)
        identity = precoding_objective(np.eye(8), ar1_covariance, cov_h, small_config, 1.0, pilots, 0.0)
        assert identity == pytest.approx(20.6)
        result = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, pilots, 0.0, n_inits=3, seed=1)
        assert result.objective_value < identity
        assert result.unitarity_error() < 1e-8

    def test_reported_objective_matches(self, small_config, ar1_covariance):
        cov_h = banded_channel_covariance(small_config, 2)
        pilots = pilot_time_power(small_config)
        omega = normalized_omega(0.5, ar1_covariance, cov_h, small_config, 1.0, pilots)
        result = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, pilots, omega, n_inits=2, seed=2)
        recomputed = precoding_objective(result.V, ar1_covariance, cov_h, small_config, 1.0, pilots, omega)
        assert result.objective_value == pytest.approx(recomputed)
        assert result.omega == omega
        assert result.init_count == 2

    def test_history_nonincreasing(self, small_config, ar1_covariance):
        """Accepted sweeps only ever lower the objective"""
        cov_h = banded_channel_covariance(small_config, 3)
        pilots = pilot_time_power(small_config)
        omega = normalized_omega(0.1, ar1_covariance, cov_h, small_config, 1.0, pilots)
        result = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, pilots, omega, n_inits=3, seed=5)
        assert len(result.history) == 3
        for trace in result.history:
            assert all(b <= a for a, b in zip(trace, trace[1:]))

    def test_never_worse_than_identity(self, small_config, rng):
        """Identity is always a candidate"""
        A = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        cov_x = SymbolCovariance(A @ A.conj().T / 8 + np.eye(8))
        cov_h = banded_channel_covariance(small_config, 4)
        pilots = pilot_time_power(small_config)
        for omega in (0.0, 0.5, 5.0):
            identity = precoding_objective(np.eye(8), cov_x, cov_h, small_config, 1.0, pilots, omega)
            result = optimize_precoder(cov_x, cov_h, small_config, 1.0, pilots, omega, n_inits=1, max_sweeps=2)
            assert result.objective_value <= identity + 1e-12
            assert result.unitarity_error() < 1e-8

    def test_deterministic(self, small_config, ar1_covariance):
        cov_h = banded_channel_covariance(small_config, 2)
        a = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, np.zeros(16), 0.0, n_inits=2, seed=9)
        b = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, np.zeros(16), 0.0, n_inits=2, seed=9)
        assert_allclose(a.V, b.V)

    def test_parallel_matches_serial(self, small_config, ar1_covariance):
        """Worker pool gives the serial result"""
        cov_h = banded_channel_covariance(small_config, 2)
        serial = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, np.zeros(16), 0.0,
                                   n_inits=2, max_sweeps=3, seed=3)
        parallel = optimize_precoder(ar1_covariance, cov_h, small_config, 1.0, np.zeros(16), 0.0,
                                     n_inits=2, max_sweeps=3, seed=3, workers=2)
        assert_allclose(serial.V, parallel.V)
        assert serial.objective_value == parallel.objective_value

    def test_pseudo_form(self, small_config, rng):
        x = rng.standard_normal((200, 8)) + 0.5j * rng.standard_normal((200, 8))
        x[:, 1:] += 0.8 * x[:, :-1]
        cov_x = estimate_symbol_covariance(x)
        cov_h = banded_channel_covariance(small_config, 2)
        identity = precoding_objective(np.eye(8), cov_x, cov_h, small_config, 1.0, np.zeros(16), 0.0, PSEUDO)
        result = optimize_precoder(cov_x, cov_h, small_config, 1.0, np.zeros(16), 0.0,
                                   n_inits=2, max_sweeps=4, form=PSEUDO, seed=6)
        assert result.objective_value <= identity
        assert result.unitarity_error() < 1e-8

    def test_non_psd(self, small_config):
        cov_x = SymbolCovariance(np.diag([1.0] * 7 + [-1.0]))
        with pytest.raises(DegenerateCovarianceError):
            optimize_precoder(cov_x, banded_channel_covariance(small_config, 2), small_config, 1.0,
                              np.zeros(16), 0.0, n_inits=1)

    @pytest.mark.parametrize("kwargs", [{"n_inits": 0}, {"omega": -1.0}, {"form": "transpose"}])
    def test_invalid_arguments(self, small_config, ar1_covariance, kwargs):
        args = {"omega": 0.0, "n_inits": 1}
        args.update(kwargs)
        with pytest.raises(InvalidArgumentError):
            optimize_precoder(ar1_covariance, banded_channel_covariance(small_config, 2), small_config, 1.0,
                              np.zeros(16), **args)

    def test_brute_force_oracle(self, tiny_config):
        """Random search over unitaries finds nothing more than 5% better"""
        cov_x = SymbolCovariance(toeplitz(0.95 ** np.arange(3)).astype(complex))
        cov_h = banded_channel_covariance(tiny_config, 2)
        pilots = np.zeros(8)
        omega = normalized_omega(0.5, cov_x, cov_h, tiny_config, 1.0, pilots)
        result = optimize_precoder(cov_x, cov_h, tiny_config, 1.0, pilots, omega, n_inits=16, seed=0)

        search = np.random.default_rng(77)
        best = min(
            precoding_objective(random_unitary(3, search), cov_x, cov_h, tiny_config, 1.0, pilots, omega)
            for _ in range(2000)
        )
        assert best >= 0.95 * result.objective_value

    @pytest.mark.slow
    @pytest.mark.timeout(120)
    def test_reference_size(self, wlan_config):
        """K_d = 48 run stays unitary and no worse than the identity"""
        cov_x = SymbolCovariance(toeplitz(0.95 ** np.arange(48)).astype(complex))
        cov_h = banded_channel_covariance(wlan_config, 4)
        pilots = pilot_time_power(wlan_config)
        omega = normalized_omega(0.1, cov_x, cov_h, wlan_config, 1.0, pilots)
        identity = precoding_objective(np.eye(48), cov_x, cov_h, wlan_config, 1.0, pilots, omega)
        result = optimize_precoder(cov_x, cov_h, wlan_config, 1.0, pilots, omega, n_inits=2, max_sweeps=3)
        assert result.unitarity_error() < 1e-8
        assert result.objective_value <= identity

    @pytest.mark.slow
    @pytest.mark.timeout(300)
    def test_reference_size_default_settings(self, wlan_config):
        """K_d = 48 with 8 restarts of 20 sweeps finishes within two minutes"""
        cov_x = SymbolCovariance(toeplitz(0.95 ** np.arange(48)).astype(complex))
        cov_h = banded_channel_covariance(wlan_config, 4)
        pilots = pilot_time_power(wlan_config)
        omega = normalized_omega(0.1, cov_x, cov_h, wlan_config, 1.0, pilots)
        identity = precoding_objective(np.eye(48), cov_x, cov_h, wlan_config, 1.0, pilots, omega)
        start = time.perf_counter()
        result = optimize_precoder(cov_x, cov_h, wlan_config, 1.0, pilots, omega, n_inits=8, max_sweeps=20, seed=0)
        elapsed = time.perf_counter() - start
        assert elapsed < 120.0
        assert result.init_count == 8
        assert result.unitarity_error() < 1e-8
        assert result.objective_value <= identity


class TestApplyPrecoding:
    """Test applying and undoing V"""

    def test_identity(self, rng):
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert_allclose(apply_precoding(np.eye(4), x), x)
        assert_allclose(invert_precoding(np.eye(4), x), x)

    def test_permutation(self):
        P = np.eye(3)[[2, 0, 1]]
        x = np.array([1.0, 2.0, 3.0], dtype=complex)
        assert_allclose(apply_precoding(P, x), P @ x)
        assert_allclose(apply_precoding(P, x), [3.0, 1.0, 2.0])

    def test_norm_and_round_trip(self, rng):
        V = random_unitary(8, rng)
        x = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
        y = apply_precoding(V, x)
        assert_allclose(y[2], V @ x[2])
        assert_allclose(np.linalg.norm(y, axis=1), np.linalg.norm(x, axis=1))
        assert_allclose(invert_precoding(V, y), x, atol=1e-10)

    def test_accepts_precoding_matrix(self, rng):
        P = PrecodingMatrix(random_unitary(4, rng))
        x = rng.standard_normal(4) + 0j
        assert_allclose(invert_precoding(P, apply_precoding(P, x)), x, atol=1e-12)

    def test_non_unitary(self):
        with pytest.raises(InvalidPrecoderError):
            invert_precoding(2 * np.eye(3), np.ones(3))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            apply_precoding(np.eye(3), np.ones(4))

    def test_closest_unitary(self, rng):
        V = random_unitary(5, rng) + 1e-3 * rng.standard_normal((5, 5))
        U = closest_unitary(V)
        assert_allclose(U @ U.conj().T, np.eye(5), atol=1e-12)


class TestPrecoderStorage:
    """Test the matrix file format"""

    def test_round_trip(self, tmp_path, rng):
        original = PrecodingMatrix(random_unitary(6, rng), objective_value=12.5, omega=0.3, init_count=8)
        path = tmp_path / "v.bin"
        save_precoder(original, path)
        loaded = load_precoder(path)
        assert_allclose(loaded.V, original.V)
        assert (loaded.objective_value, loaded.omega, loaded.init_count) == (12.5, 0.3, 8)
        assert path.stat().st_size == 24 + 16 * 36 + 20

    def test_digest_checked(self, tmp_path, rng, small_config):
        digest = covariance_digest(small_config, 2, "hermitian", 1.0)
        path = tmp_path / "v.bin"
        save_precoder(PrecodingMatrix(random_unitary(8, rng)), path, digest)
        assert load_precoder(path, expected_digest=digest).size == 8
        other = covariance_digest(small_config, 3, "hermitian", 1.0)
        with pytest.raises(ConfigHashMismatchError, match=other):
            load_precoder(path, expected_digest=other)

    def test_missing_digest_rejected_when_expected(self, tmp_path, rng, small_config):
        path = tmp_path / "v.bin"
        save_precoder(PrecodingMatrix(random_unitary(8, rng)), path)
        assert load_precoder(path).size == 8
        with pytest.raises(ConfigHashMismatchError, match="unknown"):
            load_precoder(path, expected_digest=covariance_digest(small_config, 2, "hermitian", 1.0))

    @pytest.mark.parametrize("digest", ["abc", "XYZ0123456789abc", "0123456789abcdef0"])
    def test_invalid_digest(self, tmp_path, rng, digest):
        with pytest.raises(InvalidArgumentError):
            save_precoder(PrecodingMatrix(random_unitary(2, rng)), tmp_path / "v.bin", digest)

    def test_digest_tracks_settings(self, small_config, wlan_config):
        base = covariance_digest(small_config, 2, "hermitian", 1.0)
        assert base == covariance_digest(small_config, 2, "hermitian", 1.0)
        assert base != covariance_digest(wlan_config, 2, "hermitian", 1.0)
        assert base != covariance_digest(small_config, 2, "pseudo", 1.0)
        assert base != covariance_digest(small_config, 2, "hermitian", 2.0)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "v.bin"
        path.write_bytes(b"XXXX" + bytes(4))
        with pytest.raises(FormatError):
            load_precoder(path)

    def test_truncated(self, tmp_path, rng):
        path = tmp_path / "v.bin"
        save_precoder(PrecodingMatrix(random_unitary(2, rng)), path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FormatError):
            load_precoder(path)
