"""Multipath Rayleigh channel, AWGN and coherence bandwidth"""

from jscc_sim.channel.fading import (
    ChannelProfile,
    ChannelRealization,
    apply_channel,
    coherence_subcarriers,
    deep_fade_channel,
    flat_channel,
    noise_variance,
    rms_delay_spread,
    sample_taps,
)

__all__ = [
    "ChannelProfile",
    "ChannelRealization",
    "apply_channel",
    "coherence_subcarriers",
    "deep_fade_channel",
    "flat_channel",
    "noise_variance",
    "rms_delay_spread",
    "sample_taps",
]
