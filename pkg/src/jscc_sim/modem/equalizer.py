"""
Receiver-side channel handling: LS estimation from the preamble, common phase
error removal from in-symbol pilots, and zero-forcing equalization
"""

import logging
from dataclasses import dataclass

import numpy as np

from jscc_sim.core.errors import ConfigError, FrameError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.modem.frame import time_to_spectra, training_symbol

logger = logging.getLogger(__name__)

FLOOR_FRACTION = 1e-3


@dataclass
class ChannelEstimate:
    """Frequency response estimate over all K bins"""
    h_hat: np.ndarray

    def __post_init__(self) -> None:
        self.h_hat = np.asarray(self.h_hat, dtype=np.complex128)
        if self.h_hat.ndim != 1:
            raise InvalidArgumentError("channel estimate must be a length-K sequence")
        if not np.all(np.isfinite(self.h_hat)):
            raise InvalidArgumentError("channel estimate contains NaN or Inf")

    def data_response(self, config: OfdmConfig) -> np.ndarray:
        if self.h_hat.size != config.n_subcarriers:
            raise InvalidArgumentError(
                f"estimate covers {self.h_hat.size} bins, configuration has {config.n_subcarriers}"
            )
        return self.h_hat[list(config.data_indices)]

    def floor_level(self, config: OfdmConfig) -> float:
        """epsilon = 1e-3 x median |h| over the data subcarriers (1e-3 if that median is zero)"""
        return FLOOR_FRACTION * (float(np.median(np.abs(self.data_response(config)))) or 1.0)

    def floor_mask(self, config: OfdmConfig) -> np.ndarray:
        """True for data subcarriers whose estimate falls below the floor"""
        return np.abs(self.data_response(config)) < self.floor_level(config)


def estimate_channel_ls(preamble_rx: np.ndarray, config: OfdmConfig) -> ChannelEstimate:
    """
    Least-squares estimate averaged over the preamble repeats

    Raises:
        ConfigError: no preamble, or a zero training value
        FrameError: preamble length does not match the configuration
    """
    repeats = config.preamble_repeats
    if repeats < 1:
        raise ConfigError("channel estimation needs at least one preamble repeat")
    samples = np.asarray(preamble_rx, dtype=np.complex128).reshape(-1)
    if samples.size != repeats * config.symbol_length:
        raise FrameError(f"expected {repeats * config.symbol_length} preamble samples, got {samples.size}")

    training = training_symbol(config)
    if np.any(training == 0):
        raise ConfigError("training symbol has a zero subcarrier")
    received = time_to_spectra(samples, repeats, config)
    return ChannelEstimate(h_hat=np.mean(received / training, axis=0))


def cpe_correct(symbols: np.ndarray, pilot_obs: np.ndarray, h_hat: ChannelEstimate,
                config: OfdmConfig) -> np.ndarray:
    """
    Remove the common phase of each payload symbol

    phi = arg(sum_p z_p conj(h_p * pilot_p)); symbols are rotated by exp(-j phi).
    A symbol whose pilot products sum to zero is left uncorrected.
    """
    if config.n_pilots < 1:
        raise InvalidArgumentError("common phase correction needs at least one pilot")
    z = np.atleast_2d(np.asarray(symbols, dtype=np.complex128))
    p = np.atleast_2d(np.asarray(pilot_obs, dtype=np.complex128))
    if z.shape[0] != p.shape[0] or p.shape[1] != config.n_pilots:
        raise InvalidArgumentError(f"pilot observations of shape {p.shape} do not match symbols {z.shape}")

    reference = h_hat.h_hat[list(config.pilot_indices)] * np.array(config.pilot_values)
    products = p @ reference.conj()
    degenerate = products == 0
    if np.any(degenerate):
        logger.warning("Pilot products vanish for %d symbol(s); phase left uncorrected", int(degenerate.sum()))
    phase = np.where(degenerate, 0.0, np.angle(products))
    corrected = z * np.exp(-1j * phase)[:, None]
    return corrected.reshape(np.shape(symbols))


def equalize(z: np.ndarray, h_hat: ChannelEstimate, config: OfdmConfig) -> np.ndarray:
    """
    Zero-forcing equalizer with a magnitude floor

    x_hat[k] = z[k] / h[data_indices[k]]; estimates below the floor are
    replaced by floor * phase(h) and logged.
    """
    h = h_hat.data_response(config)
    observations = np.asarray(z, dtype=np.complex128)
    if observations.shape[-1] != config.n_data:
        raise InvalidArgumentError(f"expected {config.n_data} observations per symbol, got {observations.shape}")

    floor = h_hat.floor_level(config)
    mask = np.abs(h) < floor
    if np.any(mask):
        logger.warning("Equalizer floor applied on %d data subcarrier(s)", int(mask.sum()))
        phase = np.exp(1j * np.angle(h[mask]))
        h = h.copy()
        h[mask] = floor * phase
    return observations / h
