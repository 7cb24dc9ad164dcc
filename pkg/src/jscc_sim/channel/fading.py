"""
Tapped-delay-line Rayleigh channel with exponential power-delay profile

Taps are spaced one sample (1/B) apart. Frequency responses use the
non-normalized DFT of the taps, which is the per-subcarrier gain seen after
CP removal and a unitary DFT at the receiver.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from jscc_sim.core.errors import DelaySpreadError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelProfile:
    """Power-delay profile and operating SNR; snr_db = inf disables noise"""
    n_taps: int = 4
    decay: float = 0.5
    snr_db: float = 20.0

    def __post_init__(self) -> None:
        if self.n_taps < 1:
            raise InvalidArgumentError(f"n_taps must be >= 1, got {self.n_taps}")
        if self.decay < 0:
            raise InvalidArgumentError(f"decay must be non-negative, got {self.decay}")
        if math.isnan(self.snr_db):
            raise InvalidArgumentError("snr_db must be a number")

    def tap_powers(self) -> np.ndarray:
        """Normalized exponential profile, sums to 1"""
        powers = np.exp(-self.decay * np.arange(self.n_taps))
        return powers / powers.sum()


@dataclass
class ChannelRealization:
    """
    One channel draw

    ``taps`` is None for channels defined directly in frequency (deep-fade
    notches); those are applied per OFDM symbol as an ideal CP-covered channel.
    """
    freq_response: np.ndarray
    taps: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.freq_response = np.asarray(self.freq_response, dtype=np.complex128)
        if self.taps is not None:
            self.taps = np.asarray(self.taps, dtype=np.complex128)


def noise_variance(snr_db: float, symbol_power: float = 1.0) -> float:
    """Complex noise variance per subcarrier for the given SNR"""
    if symbol_power <= 0:
        raise InvalidArgumentError(f"symbol_power must be positive, got {symbol_power}")
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return symbol_power * 10.0 ** (-snr_db / 10.0)


def sample_taps(profile: ChannelProfile, config: OfdmConfig, seed: int) -> ChannelRealization:
    """Circular complex Gaussian taps following the profile"""
    rng = np.random.default_rng(seed)
    scale = np.sqrt(profile.tap_powers() / 2.0)
    taps = scale * (rng.standard_normal(profile.n_taps) + 1j * rng.standard_normal(profile.n_taps))
    return ChannelRealization(freq_response=np.fft.fft(taps, n=config.n_subcarriers), taps=taps)


def flat_channel(config: OfdmConfig) -> ChannelRealization:
    """Identity channel"""
    return ChannelRealization(freq_response=np.ones(config.n_subcarriers, dtype=np.complex128),
                              taps=np.ones(1, dtype=np.complex128))


def deep_fade_channel(config: OfdmConfig, notch_center: int, notch_width: int,
                      notch_depth_db: float) -> ChannelRealization:
    """
    Unit response with a notch of ``notch_width`` bins around ``notch_center``

    The notch covers bins center - (width-1)//2 onward, modulo K, attenuated
    by notch_depth_db in power.
    """
    K = config.n_subcarriers
    if not 0 <= notch_center < K:
        raise InvalidArgumentError(f"notch center must lie in [0, {K}), got {notch_center}")
    if not 0 <= notch_width <= K:
        raise InvalidArgumentError(f"notch width must lie in [0, {K}], got {notch_width}")
    response = np.ones(K, dtype=np.complex128)
    start = notch_center - (notch_width - 1) // 2
    bins = [(start + i) % K for i in range(notch_width)]
    response[bins] = 10.0 ** (-notch_depth_db / 20.0)
    return ChannelRealization(freq_response=response)


def _apply_per_symbol(samples: np.ndarray, response: np.ndarray, config: OfdmConfig) -> np.ndarray:
    if samples.size % config.symbol_length:
        raise InvalidArgumentError("frequency-defined channels need whole OFDM symbols")
    blocks = samples.reshape(-1, config.symbol_length)[:, config.cp_length:]
    faded = np.fft.ifft(np.fft.fft(blocks, axis=-1) * response, axis=-1)
    return np.concatenate([faded[:, -config.cp_length:], faded], axis=1).reshape(-1)


def apply_channel(frame_samples: np.ndarray, realization: ChannelRealization, profile: ChannelProfile,
                  config: OfdmConfig, seed: int, symbol_power: float = 1.0) -> np.ndarray:
    """
    Propagate samples through the channel and add AWGN

    Args:
        frame_samples: Transmitted samples
        realization: Channel draw
        profile: Supplies the SNR
        config: OFDM configuration (CP length bounds the delay spread)
        seed: Noise seed
        symbol_power: Average transmitted data symbol power; the noise
            variance is set relative to it

    Returns:
        Received samples, same length as the input

    Raises:
        DelaySpreadError: more taps than the cyclic prefix covers
    """
    x = np.asarray(frame_samples, dtype=np.complex128).reshape(-1)
    if realization.taps is not None:
        if realization.taps.size > config.cp_length:
            raise DelaySpreadError(
                f"{realization.taps.size} taps exceed the {config.cp_length}-sample cyclic prefix"
            )
        y = np.convolve(x, realization.taps)[: x.size]
    else:
        y = _apply_per_symbol(x, realization.freq_response, config)

    sigma2 = noise_variance(profile.snr_db, symbol_power)
    if sigma2 > 0 and y.size:
        rng = np.random.default_rng(seed)
        y = y + np.sqrt(sigma2 / 2.0) * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size))
    return y


def rms_delay_spread(profile: ChannelProfile, config: OfdmConfig) -> float:
    """RMS delay spread of the tap power profile in seconds"""
    powers = profile.tap_powers()
    delays = np.arange(profile.n_taps) / config.bandwidth
    mean = float(powers @ delays)
    return math.sqrt(max(float(powers @ delays ** 2) - mean ** 2, 0.0))


def coherence_subcarriers(profile: ChannelProfile, config: OfdmConfig) -> int:
    """
    K_c = max(1, round(B_c / subcarrier spacing)) with B_c = 1 / (5 sigma_tau)

    A zero delay spread is fully coherent (K_c = K).
    """
    spread = rms_delay_spread(profile, config)
    K = config.n_subcarriers
    if spread <= 0:
        return K
    coherence_bandwidth = 1.0 / (5.0 * spread)
    k_c = math.floor(coherence_bandwidth / config.subcarrier_spacing + 0.5)
    return int(min(K, max(1, k_c)))
