"""
Progressive-coding bandwidth adaptation

Computes how many real features fit a latency budget and trims or restores
trailing feature channels. Channels are assumed to be importance-sorted, the
first channel carrying the most information.
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

import numpy as np

from jscc_sim.core.errors import InfeasibleBudgetError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.features.source import FeatureBlock

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatencyBudget:
    """End-to-end latency constraint T_max and preamble time T_p, in seconds"""
    t_max: float
    t_p: float = 0.0

    def __post_init__(self) -> None:
        if self.t_p < 0:
            raise InvalidArgumentError(f"preamble duration must be >= 0, got {self.t_p}")
        if self.t_max <= self.t_p:
            raise InfeasibleBudgetError(
                f"T_max={self.t_max}s leaves no time after the {self.t_p}s preamble"
            )

    @classmethod
    def for_config(cls, config: OfdmConfig, t_max: float) -> "LatencyBudget":
        """Budget whose preamble time comes from the frame layout"""
        return cls(t_max=t_max, t_p=config.preamble_duration)


def _decimal(value: float) -> Fraction:
    # 3e-3 means exactly 3/1000, not the nearest binary double
    return Fraction(repr(float(value)))


def _payload_capacity(config: OfdmConfig, budget: LatencyBudget) -> Fraction:
    # exact rational form of 2 K_d B (T_max - T_p) / (K + L)
    if budget.t_max <= budget.t_p:
        raise InfeasibleBudgetError(f"T_max={budget.t_max}s does not exceed T_p={budget.t_p}s")
    window = _decimal(budget.t_max) - _decimal(budget.t_p)
    return 2 * config.n_data * _decimal(config.bandwidth) * window / config.symbol_length


def max_feature_length(config: OfdmConfig, budget: LatencyBudget) -> int:
    """
    Largest number of real feature values transmittable within the budget

    N = floor(2 K_d B (T_max - T_p) / (K + L)), evaluated exactly so the
    result never exceeds the budget.

    Raises:
        InfeasibleBudgetError: T_max <= T_p
    """
    return math.floor(_payload_capacity(config, budget))


def retained_channels(config: OfdmConfig, budget: LatencyBudget, height: int, width: int,
                      channels: int) -> int:
    """
    Number of leading feature channels that fit the budget

    Args:
        config: OFDM configuration
        budget: Latency budget
        height, width, channels: Feature tensor dimensions

    Returns:
        C_T = min(C, floor(N / (H W))); 0 means nothing can be sent
    """
    if min(height, width, channels) < 1:
        raise InvalidArgumentError(f"H, W, C must be >= 1, got {(height, width, channels)}")

    fit = max_feature_length(config, budget) // (height * width)
    if fit == 0:
        logger.warning(
            "Budget T_max=%.6gs cannot carry one %dx%d channel; transmission is empty",
            budget.t_max, height, width,
        )
    return min(channels, fit)


def transmission_time(config: OfdmConfig, n_features: int) -> float:
    """Seconds needed to send n real features, preamble included"""
    if n_features < 0:
        raise InvalidArgumentError(f"feature count must be >= 0, got {n_features}")
    n_symbols = math.ceil(n_features / (2 * config.n_data))
    return config.preamble_duration + n_symbols * config.symbol_duration


def drop_channels(block: FeatureBlock, kept: int) -> FeatureBlock:
    """
    Keep the first ``kept`` channels

    Raises:
        InvalidArgumentError: kept outside [0, C]
    """
    if not 0 <= kept <= block.num_channels:
        raise InvalidArgumentError(
            f"cannot keep {kept} of {block.num_channels} channels"
        )
    return FeatureBlock(block.data[:, :, :kept].copy())


def zero_fill(block: FeatureBlock, channels: int) -> FeatureBlock:
    """
    Restore a trimmed block to ``channels`` channels, trailing ones exactly zero

    Raises:
        InvalidArgumentError: block already has more than ``channels`` channels
    """
    if block.num_channels > channels:
        raise InvalidArgumentError(
            f"block has {block.num_channels} channels, more than the target {channels}"
        )
    filled = np.zeros((block.height, block.width, channels))
    filled[:, :, : block.num_channels] = block.data
    return FeatureBlock(filled)


def mask_channel(block: FeatureBlock, index: int) -> FeatureBlock:
    """Replace a single channel with zeros"""
    if not 0 <= index < block.num_channels:
        raise InvalidArgumentError(f"channel {index} out of range [0, {block.num_channels})")
    masked = block.data.copy()
    masked[:, :, index] = 0.0
    return FeatureBlock(masked)


def schedule_table(config: OfdmConfig, t_max_values: Iterable[float], height: int, width: int,
                   channels: int, bandwidths: Optional[Iterable[float]] = None) -> List[Dict[str, float]]:
    """
    Feature budget and retained channels over a grid of latency budgets

    Args:
        config: Base OFDM configuration
        t_max_values: Latency constraints to evaluate (seconds)
        height, width, channels: Feature tensor dimensions
        bandwidths: Optional bandwidths (Hz) to sweep; defaults to config.bandwidth

    Returns:
        One row per (bandwidth, T_max) pair with keys bandwidth, t_max, n_features, channels
    """
    # Walked once per bandwidth, so a generator must not be consumed by the first
    t_max_list = list(t_max_values)
    bandwidth_list = list(bandwidths) if bandwidths is not None else []
    rows = []
    for bandwidth in (bandwidth_list or [config.bandwidth]):
        cfg = config if bandwidth == config.bandwidth else replace(config, bandwidth=bandwidth)
        for t_max in t_max_list:
            budget = LatencyBudget.for_config(cfg, t_max)
            rows.append({
                "bandwidth": float(bandwidth),
                "t_max": float(t_max),
                "n_features": max_feature_length(cfg, budget),
                "channels": retained_channels(cfg, budget, height, width, channels),
            })
    return rows
