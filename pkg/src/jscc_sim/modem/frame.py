"""
OFDM frame construction and demodulation

A frame is ``preamble_repeats`` training symbols followed by the payload
symbols. Every symbol is the unitary IDFT of a K-bin spectrum with its last L
samples prepended as cyclic prefix.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from jscc_sim.core.errors import FrameError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.mapper.symbol_mapper import SymbolSegment

logger = logging.getLogger(__name__)

# Fixed seed so transmitter and receiver agree on the training symbol
TRAINING_SEED = 0x0FD3


@dataclass
class FrameMetadata:
    """What the receiver needs besides the samples"""
    pad_count: int = 0
    scale: float = 1.0
    kept_channels: int = 0
    config_digest: str = ""


@dataclass
class OfdmFrame:
    """CP-extended time samples of one frame"""
    time_samples: np.ndarray
    n_payload_symbols: int
    metadata: FrameMetadata = field(default_factory=FrameMetadata)

    def __post_init__(self) -> None:
        self.time_samples = np.asarray(self.time_samples, dtype=np.complex128)

    def expected_length(self, config: OfdmConfig) -> int:
        return (config.preamble_repeats + self.n_payload_symbols) * config.symbol_length

    def payload(self, config: OfdmConfig) -> np.ndarray:
        """Payload samples with the preamble removed"""
        return self.time_samples[config.preamble_repeats * config.symbol_length:]


def training_symbol(config: OfdmConfig) -> np.ndarray:
    """Full-band training spectrum: unit magnitude, pseudo-random QPSK phases"""
    rng = np.random.default_rng(TRAINING_SEED)
    quadrant = rng.integers(0, 4, size=config.n_subcarriers)
    return np.exp(1j * (np.pi / 4 + np.pi / 2 * quadrant))


def spectra_to_time(spectra: np.ndarray, config: OfdmConfig) -> np.ndarray:
    """Rows of K-bin spectra -> concatenated CP-extended symbols"""
    body = np.fft.ifft(spectra, axis=-1, norm="ortho")
    with_cp = np.concatenate([body[:, -config.cp_length:], body], axis=1)
    return with_cp.reshape(-1)


def time_to_spectra(samples: np.ndarray, n_symbols: int, config: OfdmConfig) -> np.ndarray:
    """Concatenated CP-extended symbols -> rows of K-bin spectra"""
    blocks = samples.reshape(n_symbols, config.symbol_length)[:, config.cp_length:]
    return np.fft.fft(blocks, axis=-1, norm="ortho")


def preamble_samples(config: OfdmConfig) -> np.ndarray:
    if config.preamble_repeats == 0:
        return np.zeros(0, dtype=np.complex128)
    spectra = np.tile(training_symbol(config), (config.preamble_repeats, 1))
    return spectra_to_time(spectra, config)


def _as_symbol_rows(segments: Union[Sequence[SymbolSegment], np.ndarray], config: OfdmConfig) -> np.ndarray:
    if isinstance(segments, np.ndarray):
        rows = np.asarray(segments, dtype=np.complex128)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
    else:
        rows = np.array([np.asarray(s.symbols if isinstance(s, SymbolSegment) else s, dtype=np.complex128)
                         for s in segments], dtype=np.complex128)
        if rows.size == 0:
            rows = rows.reshape(0, config.n_data)
    if rows.ndim != 2 or rows.shape[1] != config.n_data:
        raise InvalidArgumentError(f"each segment must carry {config.n_data} symbols, got shape {rows.shape}")
    return rows


def modulate_frame(segments: Union[Sequence[SymbolSegment], np.ndarray], config: OfdmConfig,
                   metadata: Optional[FrameMetadata] = None) -> OfdmFrame:
    """
    Build a frame from already-precoded symbol segments

    Args:
        segments: SymbolSegments or an n x K_d complex array
        config: OFDM configuration
        metadata: Carried unchanged into the frame

    Returns:
        Frame of (preamble_repeats + n) * (K + L) samples
    """
    rows = _as_symbol_rows(segments, config)
    n = rows.shape[0]
    spectra = np.zeros((n, config.n_subcarriers), dtype=np.complex128)
    spectra[:, list(config.data_indices)] = rows
    if config.n_pilots:
        spectra[:, list(config.pilot_indices)] = np.array(config.pilot_values)

    payload = spectra_to_time(spectra, config) if n else np.zeros(0, dtype=np.complex128)
    samples = np.concatenate([preamble_samples(config), payload])
    if metadata is None:
        metadata = FrameMetadata(config_digest=config.config_digest())
    logger.debug("Modulated %d payload symbols into %d samples", n, samples.size)
    return OfdmFrame(time_samples=samples, n_payload_symbols=n, metadata=metadata)


def split_frame(rx: np.ndarray, config: OfdmConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split received samples into (preamble, payload)

    Raises:
        FrameError: length is not a whole number of symbols or misses the preamble
    """
    samples = np.asarray(rx, dtype=np.complex128).reshape(-1)
    symbol_length = config.symbol_length
    preamble_length = config.preamble_repeats * symbol_length
    if samples.size < preamble_length or (samples.size - preamble_length) % symbol_length:
        raise FrameError(
            f"{samples.size} samples is not {config.preamble_repeats} preamble symbols plus "
            f"a whole number of {symbol_length}-sample symbols"
        )
    return samples[:preamble_length], samples[preamble_length:]


def demodulate_frame(rx: np.ndarray, config: OfdmConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Undo modulation: strip CP, unitary DFT, pick data and pilot bins

    Returns:
        (n x K_d data observations in data_indices order, n x K_p pilot observations)
    """
    _, payload = split_frame(rx, config)
    n = payload.size // config.symbol_length
    if n == 0:
        return (np.zeros((0, config.n_data), dtype=np.complex128),
                np.zeros((0, config.n_pilots), dtype=np.complex128))
    spectra = time_to_spectra(payload, n, config)
    return spectra[:, list(config.data_indices)], spectra[:, list(config.pilot_indices)]
