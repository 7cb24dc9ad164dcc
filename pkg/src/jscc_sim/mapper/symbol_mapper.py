"""
Feature-to-symbol mapping

A real segment s of length 2*K_d becomes K_d complex symbols: the first half
of s fills the real parts and the second half the imaginary parts, with the
imaginary sign alternating between symbols. Symbol numbering is 1-based, so
the first symbol carries +j:

    x[k] = s[k] + j s[k + K_d]   (k odd)
    x[k] = s[k] - j s[k + K_d]   (k even)

Elements that sit next to each other in the feature map land in different
symbols, which spreads strongly correlated neighbours across the complex plane.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from jscc_sim.core.errors import InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.features.source import (
    FeatureBlock,
    flatten_channel_major,
    unflatten_channel_major,
)


@dataclass
class SymbolSegment:
    """K_d complex data symbols plus what the receiver needs to undo them"""
    symbols: np.ndarray
    scale: float = 1.0
    pad_count: int = 0

    def __post_init__(self) -> None:
        self.symbols = np.asarray(self.symbols, dtype=np.complex128)
        if self.symbols.ndim != 1:
            raise InvalidArgumentError("segment symbols must be a 1-D sequence")
        if not 0 <= self.pad_count < 2 * self.symbols.size:
            raise InvalidArgumentError(
                f"pad_count {self.pad_count} outside [0, {2 * self.symbols.size})"
            )


@dataclass(frozen=True)
class SegmentLayout:
    """Shape bookkeeping for segment_features / unsegment_features"""
    height: int
    width: int
    channels: int
    segment_length: int
    n_segments: int
    pad_count: int


def segment_features(block: FeatureBlock, config: OfdmConfig) -> Tuple[np.ndarray, SegmentLayout]:
    """
    Split a feature tensor into 2*K_d-long real segments

    The tensor is flattened channel-major (channel, then row-major spatial);
    the final segment is zero-padded.

    Returns:
        (n_segments x 2K_d array, layout metadata)
    """
    if block.num_elements == 0:
        raise InvalidArgumentError("cannot segment an empty feature block")

    flat = flatten_channel_major(block)
    seg_len = 2 * config.n_data
    n_segments = math.ceil(flat.size / seg_len)
    pad = n_segments * seg_len - flat.size

    padded = np.concatenate([flat, np.zeros(pad)])
    layout = SegmentLayout(
        height=block.height,
        width=block.width,
        channels=block.num_channels,
        segment_length=seg_len,
        n_segments=n_segments,
        pad_count=pad,
    )
    return padded.reshape(n_segments, seg_len), layout


def unsegment_features(segments: np.ndarray, layout: SegmentLayout) -> FeatureBlock:
    """Drop padding and rebuild the tensor described by ``layout``"""
    arr = np.asarray(segments, dtype=np.float64)
    if arr.shape != (layout.n_segments, layout.segment_length):
        raise InvalidArgumentError(
            f"expected segments of shape {(layout.n_segments, layout.segment_length)}, got {arr.shape}"
        )
    flat = arr.reshape(-1)
    if layout.pad_count:
        flat = flat[: flat.size - layout.pad_count]
    return unflatten_channel_major(flat, layout.height, layout.width, layout.channels)


def power_normalize(segment: np.ndarray, p_t: float = 1.0) -> Tuple[np.ndarray, float]:
    """
    Scale real values so the complex symbols built from them average p_t

    Two reals form one complex symbol, so the scale is sqrt(p_t / (2 m)) with
    m the mean square of the input. Accepts a single segment or a stack of
    segments; a stack is normalized as one ensemble. An all-zero input is
    returned unchanged with scale 1.

    Returns:
        (scaled values, scale)
    """
    if p_t <= 0:
        raise InvalidArgumentError(f"transmit power must be positive, got {p_t}")
    arr = np.asarray(segment, dtype=np.float64)
    mean_square = float(np.mean(arr ** 2)) if arr.size else 0.0
    if mean_square == 0.0:
        return arr.copy(), 1.0
    scale = math.sqrt(p_t / (2.0 * mean_square))
    return arr * scale, scale


def unnormalize(segment: np.ndarray, scale: float) -> np.ndarray:
    """Receiver-side inverse of ``power_normalize``"""
    if scale <= 0:
        raise InvalidArgumentError(f"scale must be positive, got {scale}")
    return np.asarray(segment, dtype=np.float64) / scale


def _alternating_signs(n_data: int) -> np.ndarray:
    signs = np.ones(n_data)
    signs[1::2] = -1.0
    return signs


def _check_real_length(s: np.ndarray, n_data: Optional[int]) -> np.ndarray:
    arr = np.asarray(s, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] % 2:
        raise InvalidArgumentError(f"real segment length must be even, got shape {arr.shape}")
    if n_data is not None and arr.shape[-1] != 2 * n_data:
        raise InvalidArgumentError(f"expected length {2 * n_data}, got {arr.shape[-1]}")
    return arr


def map_to_symbols(s: np.ndarray, n_data: Optional[int] = None) -> np.ndarray:
    """
    Alternating-sign half-split mapping

    Args:
        s: Real segment(s), last axis of length 2*K_d
        n_data: Expected K_d (checked when given)

    Returns:
        Complex symbols, last axis of length K_d
    """
    arr = _check_real_length(s, n_data)
    half = arr.shape[-1] // 2
    return arr[..., :half] + 1j * _alternating_signs(half) * arr[..., half:]


def inverse_map(x: np.ndarray, n_data: Optional[int] = None) -> np.ndarray:
    """Exact left inverse of ``map_to_symbols``"""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim == 0:
        raise InvalidArgumentError("expected a symbol sequence")
    if n_data is not None and arr.shape[-1] != n_data:
        raise InvalidArgumentError(f"expected {n_data} symbols, got {arr.shape[-1]}")
    signs = _alternating_signs(arr.shape[-1])
    return np.concatenate([arr.real, arr.imag * signs], axis=-1)


def naive_map(s: np.ndarray, n_data: Optional[int] = None) -> np.ndarray:
    """Baseline mapping: adjacent elements become the real and imaginary part of one symbol"""
    arr = _check_real_length(s, n_data)
    return arr[..., 0::2] + 1j * arr[..., 1::2]


def naive_inverse_map(x: np.ndarray) -> np.ndarray:
    """Inverse of ``naive_map``"""
    arr = np.asarray(x, dtype=np.complex128)
    out = np.empty(arr.shape[:-1] + (2 * arr.shape[-1],))
    out[..., 0::2] = arr.real
    out[..., 1::2] = arr.imag
    return out
