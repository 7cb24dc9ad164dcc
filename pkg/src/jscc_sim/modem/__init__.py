"""OFDM modem: framing, PA model, channel estimation, equalization and I/Q files"""

from jscc_sim.modem.amplifier import pa_backoff_amplitude, pa_soft_clip
from jscc_sim.modem.equalizer import ChannelEstimate, cpe_correct, equalize, estimate_channel_ls
from jscc_sim.modem.frame import (
    FrameMetadata,
    OfdmFrame,
    demodulate_frame,
    modulate_frame,
    split_frame,
    training_symbol,
)
from jscc_sim.modem.iq_file import read_iq_frame, write_iq_frame
from jscc_sim.modem.link import ReceiveResult, TransmitResult, receive_block, transmit_block

__all__ = [
    "ChannelEstimate",
    "FrameMetadata",
    "OfdmFrame",
    "ReceiveResult",
    "TransmitResult",
    "cpe_correct",
    "demodulate_frame",
    "equalize",
    "estimate_channel_ls",
    "modulate_frame",
    "pa_backoff_amplitude",
    "pa_soft_clip",
    "read_iq_frame",
    "receive_block",
    "split_frame",
    "training_symbol",
    "transmit_block",
    "write_iq_frame",
]
