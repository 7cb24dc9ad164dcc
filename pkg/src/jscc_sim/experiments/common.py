"""Building blocks shared by the experiment runners"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from jscc_sim.channel.fading import (
    ChannelProfile,
    ChannelRealization,
    apply_channel,
    coherence_subcarriers,
    deep_fade_channel,
    sample_taps,
)
from jscc_sim.core.artifacts import derive_seed
from jscc_sim.core.errors import ConfigError, ConfigHashMismatchError
from jscc_sim.experiments.config import ExperimentConfig
from jscc_sim.features.source import FeatureBlock, FeatureSpec, generate_features, generate_raw_features
from jscc_sim.features.storage import load_features
from jscc_sim.mapper.symbol_mapper import map_to_symbols, power_normalize, segment_features
from jscc_sim.modem.amplifier import pa_backoff_amplitude, pa_soft_clip
from jscc_sim.modem.equalizer import ChannelEstimate
from jscc_sim.modem.link import receive_block, transmit_block
from jscc_sim.precoder.covariance import banded_channel_covariance, estimate_symbol_covariance
from jscc_sim.precoder.objective import (
    PrecodingMatrix,
    normalized_omega,
    objective_terms,
    pilot_time_power,
)
from jscc_sim.precoder.optimizer import optimize_precoder
from jscc_sim.precoder.storage import covariance_digest, load_precoder

logger = logging.getLogger(__name__)

# Disjoint seed-stream offsets per task family
FEATURE_STREAM = 0
CHANNEL_STREAM = 1_000_000
NOISE_STREAM = 2_000_000
PRECODER_STREAM = 3_000_000


def feature_spec(config: ExperimentConfig) -> FeatureSpec:
    s = config.features
    return FeatureSpec(height=s.height, width=s.width, channels=s.channels, rho=s.rho, sigma=s.sigma)


def load_blocks(config: ExperimentConfig, clip: Optional[bool] = None) -> List[FeatureBlock]:
    """
    Feature blocks of an experiment

    A feature file gives a single block; otherwise n_blocks synthetic blocks
    are drawn, block i from derive_seed(seed, i).

    Args:
        config: Experiment config
        clip: Override features.clip (synthetic blocks only)
    """
    if config.features.path is not None:
        block = load_features(config.features.path)
        logger.info("Loaded %dx%dx%d features from %s", block.height, block.width,
                    block.num_channels, config.features.path)
        return [block]

    spec = feature_spec(config)
    use_clip = config.features.clip if clip is None else clip
    blocks = []
    for index in range(config.features.n_blocks):
        seed = derive_seed(config.seed, FEATURE_STREAM + index)
        if use_clip:
            blocks.append(generate_features(spec, seed))
        else:
            blocks.append(FeatureBlock(generate_raw_features(spec, seed)))
    logger.debug("Generated %d synthetic blocks (clip=%s)", len(blocks), use_clip)
    return blocks


def training_symbols(blocks: List[FeatureBlock], config: ExperimentConfig) -> np.ndarray:
    """Mapped, power-normalized data symbols of every block stacked as M x K_d"""
    rows = []
    for block in blocks:
        segments, _ = segment_features(block, config.ofdm)
        scaled, _ = power_normalize(segments, config.precoder.p_t)
        rows.append(map_to_symbols(scaled, config.ofdm.n_data))
    return np.concatenate(rows, axis=0)


def channel_profile(config: ExperimentConfig, snr_db: float) -> ChannelProfile:
    return ChannelProfile(n_taps=config.channel.n_taps, decay=config.channel.decay, snr_db=snr_db)


def coherence_width(config: ExperimentConfig) -> int:
    """Configured K_c, else the value implied by the delay profile"""
    if config.precoder.coherence is not None:
        return config.precoder.coherence
    return coherence_subcarriers(channel_profile(config, config.channel.snr_db[0]), config.ofdm)


def precoder_digest(config: ExperimentConfig) -> str:
    """Digest stored with a matrix; a reused matrix must match it"""
    settings = config.precoder
    return covariance_digest(config.ofdm, coherence_width(config), settings.form, settings.p_t)


@dataclass
class PrecoderBuild:
    precoder: PrecodingMatrix
    identity_objective: float
    relative_omega: float
    coherence: int


def build_precoder(config: ExperimentConfig, symbols: np.ndarray) -> PrecoderBuild:
    """
    Load the configured precoder or optimize one on ``symbols``

    Args:
        config: Experiment config
        symbols: M x K_d training symbols for the covariance estimate
    """
    settings = config.precoder
    ofdm = config.ofdm
    coherence = coherence_width(config)
    cov_x = estimate_symbol_covariance(symbols)
    cov_h = banded_channel_covariance(ofdm, coherence)
    pilots = pilot_time_power(ofdm)
    omega = normalized_omega(settings.omega, cov_x, cov_h, ofdm, settings.p_t, pilots, settings.form)
    identity = np.eye(ofdm.n_data, dtype=np.complex128)
    corr, peak = objective_terms(identity, cov_x, cov_h, ofdm, settings.p_t, pilots, settings.form)

    if settings.matrix_path is not None:
        try:
            precoder = load_precoder(settings.matrix_path, expected_digest=precoder_digest(config))
        except ConfigHashMismatchError as e:
            raise ConfigError(
                f"precoder.matrix_path was optimized for another subcarrier plan or covariance setting: {e}"
            ) from e
        logger.info("Loaded precoder from %s", settings.matrix_path)
    else:
        precoder = optimize_precoder(
            cov_x, cov_h, ofdm, settings.p_t, pilots, omega,
            n_inits=settings.n_inits,
            max_sweeps=settings.max_sweeps,
            tol=settings.tol,
            seed=derive_seed(config.seed, PRECODER_STREAM),
            form=settings.form,
            workers=settings.workers,
        )
    return PrecoderBuild(precoder=precoder, identity_objective=corr + omega * peak,
                         relative_omega=settings.omega, coherence=coherence)


def channel_realization(config: ExperimentConfig, snr_db: float, task_index: int) -> ChannelRealization:
    """Deep-fade notch when configured, else a Rayleigh draw for this task"""
    fade = config.channel.deep_fade
    if fade is not None:
        return deep_fade_channel(config.ofdm, fade.center, fade.width, fade.depth_db)
    profile = channel_profile(config, snr_db)
    return sample_taps(profile, config.ofdm, derive_seed(config.seed, CHANNEL_STREAM + task_index))


@dataclass
class LinkOutcome:
    """Data symbols are K_d positions before precoding, tx/rx symbols the on-air ones"""
    sent_symbols: np.ndarray
    data_symbols: np.ndarray
    tx_symbols: np.ndarray
    rx_symbols: np.ndarray
    block: FeatureBlock
    payload: np.ndarray


def run_link(block: FeatureBlock, config: ExperimentConfig, snr_db: float, task_index: int,
             precoder: Optional[PrecodingMatrix] = None,
             realization: Optional[ChannelRealization] = None) -> LinkOutcome:
    """
    One block through transmitter, optional PA, channel and receiver

    Args:
        block: Features to send
        config: Experiment config
        snr_db: Channel SNR
        task_index: Seeds the channel draw and the noise
        precoder: Unitary precoder or None
        realization: Fixed channel; drawn from the config when None
    """
    ofdm = config.ofdm
    matrix = precoder.V if precoder is not None else None
    tx = transmit_block(block, ofdm, matrix, config.precoder.p_t)
    samples = tx.frame.time_samples
    if config.channel.pa_backoff is not None:
        clip = pa_backoff_amplitude(tx.frame.payload(ofdm), config.channel.pa_backoff)
        samples = pa_soft_clip(samples, clip)

    if realization is None:
        realization = channel_realization(config, snr_db, task_index)
    profile = channel_profile(config, snr_db)
    rx = apply_channel(samples, realization, profile, ofdm,
                       seed=derive_seed(config.seed, NOISE_STREAM + task_index),
                       symbol_power=config.precoder.p_t)

    csi = ChannelEstimate(realization.freq_response) if config.channel.perfect_csi else None
    result = receive_block(rx, ofdm, tx.layout, tx.frame.metadata.scale, matrix, csi)
    # Equalized on-air symbols, before the precoder is undone
    rx_symbols = result.data_symbols @ matrix.T if matrix is not None else result.data_symbols
    return LinkOutcome(
        sent_symbols=tx.data_symbols,
        data_symbols=result.data_symbols,
        tx_symbols=tx.tx_symbols,
        rx_symbols=rx_symbols,
        block=result.block,
        payload=tx.frame.payload(ofdm),
    )
