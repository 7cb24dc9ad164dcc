"""
Transmit and receive chains between a feature tensor and OFDM samples

    transmit: segment -> normalize -> map -> precode -> modulate
    receive:  demodulate -> CPE -> equalize -> unprecode -> unmap -> unnormalize
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from jscc_sim.core.types import OfdmConfig
from jscc_sim.features.source import FeatureBlock
from jscc_sim.mapper.symbol_mapper import (
    SegmentLayout,
    inverse_map,
    map_to_symbols,
    power_normalize,
    segment_features,
    unnormalize,
    unsegment_features,
)
from jscc_sim.modem.equalizer import ChannelEstimate, cpe_correct, equalize, estimate_channel_ls
from jscc_sim.modem.frame import FrameMetadata, OfdmFrame, demodulate_frame, modulate_frame, split_frame
from jscc_sim.precoder.objective import MatrixLike
from jscc_sim.precoder.optimizer import apply_precoding, invert_precoding

logger = logging.getLogger(__name__)


@dataclass
class TransmitResult:
    """Frame plus the transmitter-side symbols, kept for error analysis"""
    frame: OfdmFrame
    layout: SegmentLayout
    data_symbols: np.ndarray
    tx_symbols: np.ndarray


@dataclass
class ReceiveResult:
    block: FeatureBlock
    data_symbols: np.ndarray
    estimate: ChannelEstimate


def transmit_block(block: FeatureBlock, config: OfdmConfig, precoder: Optional[MatrixLike] = None,
                   p_t: float = 1.0) -> TransmitResult:
    """
    Turn a feature tensor into one OFDM frame

    Args:
        block: Features to send (all channels are sent)
        config: OFDM configuration
        precoder: Unitary V; None sends the mapped symbols unprecoded
        p_t: Average data symbol power
    """
    segments, layout = segment_features(block, config)
    scaled, scale = power_normalize(segments, p_t)
    data_symbols = map_to_symbols(scaled, config.n_data)
    tx_symbols = apply_precoding(precoder, data_symbols) if precoder is not None else data_symbols
    metadata = FrameMetadata(
        pad_count=layout.pad_count,
        scale=scale,
        kept_channels=block.num_channels,
        config_digest=config.config_digest(),
    )
    frame = modulate_frame(tx_symbols, config, metadata)
    logger.debug("Transmit block %dx%dx%d as %d symbols", block.height, block.width,
                 block.num_channels, frame.n_payload_symbols)
    return TransmitResult(frame=frame, layout=layout, data_symbols=data_symbols, tx_symbols=tx_symbols)


def receive_block(rx: np.ndarray, config: OfdmConfig, layout: SegmentLayout, scale: float,
                  precoder: Optional[MatrixLike] = None, csi: Optional[ChannelEstimate] = None,
                  phase_correction: bool = True) -> ReceiveResult:
    """
    Recover the feature tensor from received samples

    Args:
        rx: Received frame samples (preamble included)
        config: OFDM configuration
        layout: Segment layout from the transmitter
        scale: Power normalization scale from the frame metadata
        precoder: V used at the transmitter, if any
        csi: Known channel response; estimated from the preamble when None
        phase_correction: Apply pilot-based common phase correction
    """
    preamble, _ = split_frame(rx, config)
    estimate = csi if csi is not None else estimate_channel_ls(preamble, config)

    observations, pilots = demodulate_frame(rx, config)
    if phase_correction and config.n_pilots:
        observations = cpe_correct(observations, pilots, estimate, config)
    equalized = equalize(observations, estimate, config)
    data_symbols = invert_precoding(precoder, equalized) if precoder is not None else equalized

    values = unnormalize(inverse_map(data_symbols, config.n_data), scale)
    block = unsegment_features(values, layout)
    return ReceiveResult(block=block, data_symbols=data_symbols, estimate=estimate)
