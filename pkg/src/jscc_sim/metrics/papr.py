"""Peak-to-average power ratio and empirical distributions"""

from typing import List, Sequence, Tuple

import numpy as np

from jscc_sim.core.errors import InvalidArgumentError, UndefinedMetricError
from jscc_sim.core.types import OfdmConfig


def papr_db(time_samples: np.ndarray) -> float:
    """
    10 log10(max |v|^2 / mean |v|^2)

    Raises:
        UndefinedMetricError: all samples are zero
    """
    v = np.asarray(time_samples, dtype=np.complex128).reshape(-1)
    if v.size == 0:
        raise InvalidArgumentError("PAPR of an empty sequence")
    power = np.abs(v) ** 2
    mean = float(np.mean(power))
    if mean == 0.0:
        raise UndefinedMetricError("PAPR is undefined for a zero signal")
    return float(10.0 * np.log10(np.max(power) / mean))


def papr_per_symbol(frame_samples: np.ndarray, config: OfdmConfig) -> np.ndarray:
    """
    PAPR of every OFDM symbol with its cyclic prefix excluded

    Args:
        frame_samples: Whole CP-extended symbols (typically a frame payload)
        config: OFDM configuration

    Returns:
        One PAPR value in dB per symbol
    """
    v = np.asarray(frame_samples, dtype=np.complex128).reshape(-1)
    if v.size == 0 or v.size % config.symbol_length:
        raise InvalidArgumentError(
            f"{v.size} samples is not a whole number of {config.symbol_length}-sample symbols"
        )
    power = np.abs(v.reshape(-1, config.symbol_length)[:, config.cp_length:]) ** 2
    mean = power.mean(axis=1)
    if np.any(mean == 0.0):
        raise UndefinedMetricError("PAPR is undefined for an all-zero OFDM symbol")
    return 10.0 * np.log10(power.max(axis=1) / mean)


def empirical_cdf(values: Sequence[float]) -> List[Tuple[float, float]]:
    """Sorted (value, i/n) pairs"""
    data = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    if data.size == 0:
        raise InvalidArgumentError("empirical CDF of an empty sample")
    probabilities = np.arange(1, data.size + 1) / data.size
    return [(float(x), float(p)) for x, p in zip(data, probabilities)]


def empirical_ccdf(values: Sequence[float], thresholds: Sequence[float]) -> np.ndarray:
    """Fraction of values strictly above each threshold"""
    data = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    if data.size == 0:
        raise InvalidArgumentError("empirical CCDF of an empty sample")
    above = data.size - np.searchsorted(data, np.asarray(thresholds, dtype=np.float64), side="right")
    return above / data.size
