"""
Synthetic encoder-output source

Stands in for a trained JSCC encoder: each feature channel is a stationary
Gaussian AR(1) sequence over its row-major spatial index, passed through the
clip activation. Channels are exchangeable, so any importance ordering the
scheduler assumes is nominal for synthetic blocks.
"""

from dataclasses import dataclass
from typing import List, Union

import numpy as np
from scipy.signal import lfilter

from jscc_sim.core.errors import (
    FeatureRangeError,
    InvalidArgumentError,
    UndefinedCorrelationError,
)


@dataclass
class FeatureBlock:
    """H x W x C real feature tensor"""
    data: np.ndarray

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise InvalidArgumentError(f"feature tensor must be H x W x C, got shape {self.data.shape}")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise InvalidArgumentError(f"spatial dimensions must be >= 1, got {self.data.shape[:2]}")

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def num_channels(self) -> int:
        return int(self.data.shape[2])

    @property
    def num_elements(self) -> int:
        return int(self.data.size)

    def channel(self, index: int) -> np.ndarray:
        """Row-major flattened sequence of one channel"""
        return self.data[:, :, index].reshape(-1)

    def check_range(self) -> None:
        """Raise FeatureRangeError unless every value is finite and within [-1, 1]"""
        if not np.all(np.isfinite(self.data)):
            raise FeatureRangeError("feature tensor contains NaN or Inf")
        if self.data.size and np.max(np.abs(self.data)) > 1.0:
            raise FeatureRangeError(
                f"feature value {np.max(np.abs(self.data)):.6g} outside [-1, 1]"
            )


@dataclass(frozen=True)
class FeatureSpec:
    """Shape and statistics of a synthetic feature block"""
    height: int
    width: int
    channels: int
    rho: float = 0.9
    sigma: float = 0.5

    def __post_init__(self) -> None:
        if min(self.height, self.width, self.channels) < 1:
            raise InvalidArgumentError(
                f"H, W, C must be >= 1, got {(self.height, self.width, self.channels)}"
            )
        if not 0.0 <= self.rho < 1.0:
            raise InvalidArgumentError(f"rho must lie in [0, 1), got {self.rho}")
        if self.sigma <= 0:
            raise InvalidArgumentError(f"sigma must be positive, got {self.sigma}")


def clip_activation(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Clip activation min(max(x, -1), 1)

    Args:
        x: Scalar or array of finite reals

    Returns:
        Clipped value(s), same shape as input
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise InvalidArgumentError("clip activation is undefined for NaN")
    clipped = np.clip(arr, -1.0, 1.0)
    if clipped.ndim == 0:
        return float(clipped)
    return clipped


def generate_raw_features(spec: FeatureSpec, seed: int) -> np.ndarray:
    """
    Pre-activation AR(1) tensor

    Each channel is x[n] = rho*x[n-1] + sqrt(1-rho^2)*sigma*e[n], started from
    the stationary distribution so every sample has standard deviation sigma.

    Returns:
        H x W x C array, not clipped
    """
    rng = np.random.default_rng(seed)
    n = spec.height * spec.width
    innovations = rng.standard_normal((spec.channels, n))
    initial = rng.standard_normal((spec.channels, 1)) * spec.sigma

    gain = np.sqrt(1.0 - spec.rho ** 2) * spec.sigma
    sequences, _ = lfilter([gain], [1.0, -spec.rho], innovations, axis=-1, zi=spec.rho * initial)
    return sequences.reshape(spec.channels, spec.height, spec.width).transpose(1, 2, 0)


def generate_features(spec: FeatureSpec, seed: int) -> FeatureBlock:
    """
    Synthetic encoder output with clip activation applied

    Args:
        spec: Shape and AR(1) statistics
        seed: Generator seed; identical (spec, seed) gives identical tensors

    Returns:
        FeatureBlock with values in [-1, 1]
    """
    return FeatureBlock(clip_activation(generate_raw_features(spec, seed)))


def quantize_half(block: FeatureBlock) -> FeatureBlock:
    """
    Emulate 16-bit converter precision

    Rounds every value to the nearest IEEE binary16 number (round half to even)
    and widens back to float64.
    """
    return FeatureBlock(block.data.astype(np.float16).astype(np.float64))


def flatten_channel_major(block: FeatureBlock) -> np.ndarray:
    """Channel 0 row-major, then channel 1, ... as one real sequence"""
    return block.data.transpose(2, 0, 1).reshape(-1)


def unflatten_channel_major(sequence: np.ndarray, height: int, width: int,
                            channels: int) -> FeatureBlock:
    """Inverse of ``flatten_channel_major``"""
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.size != height * width * channels:
        raise InvalidArgumentError(
            f"sequence of {seq.size} values cannot fill {height}x{width}x{channels}"
        )
    return FeatureBlock(seq.reshape(channels, height, width).transpose(1, 2, 0))


def lag_correlation(sequence: np.ndarray, max_distance: int) -> np.ndarray:
    """
    Pearson correlation between a sequence and its d-shifted copy, d = 0..max_distance

    Raises:
        UndefinedCorrelationError: a shifted pair has zero variance
    """
    x = np.asarray(sequence, dtype=np.float64).reshape(-1)
    if max_distance < 0 or x.size <= max_distance:
        raise InvalidArgumentError(
            f"need more than max_distance={max_distance} samples, got {x.size}"
        )
    result = np.empty(max_distance + 1)
    result[0] = 1.0
    if np.all(x == x[0]):
        raise UndefinedCorrelationError("sequence is constant")
    for d in range(1, max_distance + 1):
        a = x[: x.size - d] - x[: x.size - d].mean()
        b = x[d:] - x[d:].mean()
        denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
        if denom == 0.0:
            raise UndefinedCorrelationError(f"zero variance at distance {d}")
        result[d] = np.dot(a, b) / denom
    return result


def empirical_feature_correlation(block: FeatureBlock, max_distance: int) -> List[float]:
    """
    Correlation between feature elements at increasing distance

    Args:
        block: Feature tensor
        max_distance: Largest shift d to evaluate

    Returns:
        Entry d is the lag-d correlation averaged over channels; entry 0 is 1.0
    """
    if block.num_channels == 0:
        raise UndefinedCorrelationError("block has no channels")
    per_channel = np.stack(
        [lag_correlation(block.channel(c), max_distance) for c in range(block.num_channels)]
    )
    averaged = per_channel.mean(axis=0)
    averaged[0] = 1.0
    return averaged.tolist()
