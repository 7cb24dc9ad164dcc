"""
Unitary DFT utilities

Both directions are scaled by 1/sqrt(K) so Parseval holds exactly and the
per-subcarrier power of a frequency-domain symbol equals its time-domain
contribution.
"""

from typing import Optional

import numpy as np
from scipy.stats import unitary_group

from jscc_sim.core.errors import InvalidArgumentError
from jscc_sim.core.types import OfdmConfig


def _as_sequence(x: np.ndarray, length: Optional[int]) -> np.ndarray:
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"expected a 1-D sequence, got shape {arr.shape}")
    if length is not None and arr.size != length:
        raise InvalidArgumentError(f"expected length {length}, got {arr.size}")
    if arr.size == 0:
        raise InvalidArgumentError("empty sequence")
    return arr


def unitary_dft(x: np.ndarray, length: Optional[int] = None) -> np.ndarray:
    """
    Unitary forward DFT

    Args:
        x: Length-K complex sequence
        length: Required length K (checked when given)

    Returns:
        Length-K spectrum with ||X|| = ||x||
    """
    return np.fft.fft(_as_sequence(x, length), norm="ortho")


def unitary_idft(x: np.ndarray, length: Optional[int] = None) -> np.ndarray:
    """
    Unitary inverse DFT (the OFDM symbol generator)

    Args:
        x: Length-K frequency-domain symbol
        length: Required length K (checked when given)

    Returns:
        Length-K time-domain samples with ||y|| = ||x||
    """
    return np.fft.ifft(_as_sequence(x, length), norm="ortho")


def dft_matrix(n: int) -> np.ndarray:
    """Full n-point unitary DFT matrix, entry [k, m] = exp(-2j*pi*k*m/n)/sqrt(n)"""
    if n < 1:
        raise InvalidArgumentError(f"DFT size must be positive, got {n}")
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def truncated_dft_matrix(config: OfdmConfig) -> np.ndarray:
    """
    Rows of the unitary DFT matrix that belong to data subcarriers

    Row r is row data_indices[r] of the K-point unitary DFT, so the OFDM data
    waveform is F^H x and F F^H = I_{K_d}.

    Args:
        config: OFDM configuration

    Returns:
        K_d x K complex matrix F
    """
    return dft_matrix(config.n_subcarriers)[list(config.data_indices), :]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary matrix drawn from ``rng``"""
    if n < 1:
        raise InvalidArgumentError(f"matrix size must be positive, got {n}")
    if n == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return np.asarray(unitary_group.rvs(n, random_state=rng), dtype=np.complex128)
