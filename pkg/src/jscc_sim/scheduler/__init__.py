"""Latency-driven feature scheduling (progressive coding)"""

from jscc_sim.scheduler.budget import (
    LatencyBudget,
    drop_channels,
    mask_channel,
    max_feature_length,
    retained_channels,
    schedule_table,
    transmission_time,
    zero_fill,
)

__all__ = [
    "LatencyBudget",
    "drop_channels",
    "mask_channel",
    "max_feature_length",
    "retained_channels",
    "schedule_table",
    "transmission_time",
    "zero_fill",
]
