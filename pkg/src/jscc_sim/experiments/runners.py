"""
Experiment runners, one per kind

Each runner writes its artifacts into the output directory and returns their
paths. Every CSV starts with the ``# config_hash=... seed=...`` stamp and
every YAML summary carries the same keys.

Artifacts per kind:

    papr         papr_cdf.csv (variant, papr_db, probability), papr_summary.yaml
    correlation  feature_correlation.csv (distance, correlation),
                 subcarrier_correlation.csv (variant, row, col, value),
                 correlation_summary.yaml
    precode      precoder.bin, precode_history.csv (init, sweep, objective),
                 precode_summary.yaml
    e2e          e2e.csv (variant, snr_db, feature_mse, psnr_db),
                 subcarrier_mse.csv (variant, snr_db, subcarrier, mse), e2e_summary.yaml
    schedule     schedule.csv (bandwidth, t_max, n_features, channels),
                 progressive.csv (channels, feature_mse),
                 masking.csv (channel, feature_mse) with budget.masking
    stream       stream_events.csv (one row per frame, per-frame quality with
                 stream.modem), stream_summary.yaml
"""

import logging
import math
import os
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from jscc_sim.core.artifacts import derive_seed, write_csv
from jscc_sim.core.errors import ConfigError
from jscc_sim.experiments.common import (
    build_precoder,
    channel_realization,
    coherence_width,
    feature_spec,
    load_blocks,
    precoder_digest,
    run_link,
    training_symbols,
)
from jscc_sim.experiments.config import ExperimentConfig
from jscc_sim.features.source import FeatureBlock, empirical_feature_correlation, generate_features, quantize_half
from jscc_sim.metrics.papr import empirical_cdf, papr_per_symbol
from jscc_sim.metrics.quality import (
    MS_SSIM_MIN_SIDE,
    FrameQuality,
    cross_subcarrier_correlation,
    frame_quality,
    ms_ssim_db,
    per_subcarrier_mse,
    psnr_db,
)
from jscc_sim.metrics.report import MetricsReport
from jscc_sim.modem.link import transmit_block
from jscc_sim.precoder.storage import save_precoder
from jscc_sim.scheduler.budget import drop_channels, mask_channel, schedule_table, zero_fill
from jscc_sim.streamer.pipeline import PipelineConfig, StageFn, StageTime, run_pipeline
from jscc_sim.streamer.summary import report_to_csv, summarize_report

logger = logging.getLogger(__name__)

PLAIN = "plain"
PRECODED = "precoded"
UNCLIPPED = "unclipped"
QUANTIZED = "quantized"

# Features live in [-1, 1]
FEATURE_RANGE = 2.0

Runner = Callable[[ExperimentConfig, Path], List[Path]]


def _report(config: ExperimentConfig) -> MetricsReport:
    return MetricsReport(config_hash=config.config_hash(), seed=config.seed)


def _write_csv(config: ExperimentConfig, path: Path, columns, rows) -> Path:
    return write_csv(path, columns, rows, config.config_hash(), config.seed)


def _papr_values(blocks: List[FeatureBlock], config: ExperimentConfig, precoder=None) -> np.ndarray:
    values = []
    for block in blocks:
        tx = transmit_block(block, config.ofdm, precoder, config.precoder.p_t)
        values.append(papr_per_symbol(tx.frame.payload(config.ofdm), config.ofdm))
    return np.concatenate(values)


def run_papr(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """PAPR distribution of clipped, unclipped and precoded waveforms"""
    blocks = load_blocks(config, clip=True)
    variants: Dict[str, np.ndarray] = {PLAIN: _papr_values(blocks, config)}

    if config.features.path is None:
        variants[UNCLIPPED] = _papr_values(load_blocks(config, clip=False), config)
    if config.precoder.enabled:
        build = build_precoder(config, training_symbols(blocks, config))
        variants[PRECODED] = _papr_values(blocks, config, build.precoder.V)

    rows = []
    report = _report(config)
    for name, values in variants.items():
        rows.extend((name, value, probability) for value, probability in empirical_cdf(values))
        report.add(f"{name}_p50", float(np.percentile(values, 50)), "dB")
        report.add(f"{name}_p99", float(np.percentile(values, 99)), "dB")
        report.add(f"{name}_symbols", float(values.size))
        logger.info("PAPR %s: p99 %.2f dB over %d symbols", name, np.percentile(values, 99), values.size)
    if PRECODED in variants:
        reduction = np.percentile(variants[PLAIN], 99) - np.percentile(variants[PRECODED], 99)
        report.add("p99_reduction", float(reduction), "dB")

    return [
        _write_csv(config, out_dir / "papr_cdf.csv", ("variant", "papr_db", "probability"), rows),
        report.to_yaml(out_dir / "papr_summary.yaml"),
    ]


def _band_mean(matrix: np.ndarray, config: ExperimentConfig, coherence: int) -> float:
    """Mean |correlation| over distinct subcarrier pairs closer than K_c"""
    freqs = np.array([config.ofdm.frequency_index(i) for i in config.ofdm.data_indices])
    distance = np.abs(freqs[:, None] - freqs[None, :])
    band = (distance < coherence) & (distance > 0)
    if not np.any(band):
        return 0.0
    return float(np.mean(matrix[band]))


def run_correlation(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Feature correlation over distance and received-symbol correlation across subcarriers"""
    blocks = load_blocks(config)
    first = blocks[0]
    max_distance = min(16, first.height * first.width - 1)
    lag = empirical_feature_correlation(first, max_distance)

    snr = config.channel.snr_db[0]
    coherence = coherence_width(config)
    variants = {PLAIN: None}
    if config.precoder.enabled:
        variants[PRECODED] = build_precoder(config, training_symbols(blocks, config)).precoder

    rows = []
    report = _report(config)
    report.add("feature_lag1_correlation", lag[1] if len(lag) > 1 else 1.0)
    for name, precoder in variants.items():
        received = np.concatenate([
            run_link(block, config, snr, index, precoder).rx_symbols
            for index, block in enumerate(blocks)
        ])
        matrix = cross_subcarrier_correlation(received)
        n = matrix.shape[0]
        rows.extend((name, i, j, float(matrix[i, j])) for i in range(n) for j in range(n))
        report.add(f"{name}_band_correlation", _band_mean(matrix, config, coherence))

    return [
        _write_csv(config, out_dir / "feature_correlation.csv", ("distance", "correlation"),
                   list(enumerate(lag))),
        _write_csv(config, out_dir / "subcarrier_correlation.csv", ("variant", "row", "col", "value"), rows),
        report.to_yaml(out_dir / "correlation_summary.yaml"),
    ]


def run_precode(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Optimize, persist and report the precoder against the identity"""
    if config.precoder.matrix_path is not None:
        raise ConfigError("precode optimizes a new matrix; remove precoder.matrix_path")
    blocks = load_blocks(config)
    build = build_precoder(config, training_symbols(blocks, config))
    precoder = build.precoder

    matrix_path = out_dir / "precoder.bin"
    save_precoder(precoder, matrix_path, precoder_digest(config))
    history_rows = [
        (init, sweep, value)
        for init, trace in enumerate(precoder.history)
        for sweep, value in enumerate(trace)
    ]

    report = _report(config)
    report.add("objective", precoder.objective_value)
    report.add("identity_objective", build.identity_objective)
    report.add("improvement", build.identity_objective - precoder.objective_value)
    report.add("omega", precoder.omega)
    report.add("relative_omega", build.relative_omega)
    report.add("coherence", float(build.coherence))
    report.add("n_inits", float(precoder.init_count))
    report.add("unitarity_error", precoder.unitarity_error())
    logger.info("Precoder objective %.6f vs identity %.6f", precoder.objective_value, build.identity_objective)

    return [
        matrix_path,
        _write_csv(config, out_dir / "precode_history.csv", ("init", "sweep", "objective"), history_rows),
        report.to_yaml(out_dir / "precode_summary.yaml"),
    ]


def _snr_label(snr_db: float) -> str:
    return "inf" if math.isinf(snr_db) else f"{snr_db:g}"


def run_e2e(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Feature and per-subcarrier error across an SNR sweep"""
    blocks = load_blocks(config)
    variants = {PLAIN: None}
    if config.precoder.enabled:
        variants[PRECODED] = build_precoder(config, training_symbols(blocks, config)).precoder
    if config.features.quantize:
        variants[QUANTIZED] = None

    summary_rows = []
    subcarrier_rows = []
    report = _report(config)
    for name, precoder in variants.items():
        # Encoder output and decoder input both at half precision
        quantized = name == QUANTIZED
        for snr_index, snr in enumerate(config.channel.snr_db):
            sent, received, sent_syms, data_syms = [], [], [], []
            for index, block in enumerate(blocks):
                task = snr_index * len(blocks) + index
                outcome = run_link(quantize_half(block) if quantized else block, config, snr, task, precoder)
                sent.append(block.data)
                received.append(quantize_half(outcome.block).data if quantized else outcome.block.data)
                sent_syms.append(outcome.sent_symbols)
                data_syms.append(outcome.data_symbols)
            sent_arr, received_arr = np.stack(sent), np.stack(received)
            feature_mse = float(np.mean((sent_arr - received_arr) ** 2))
            psnr = psnr_db(sent_arr, received_arr, FEATURE_RANGE)
            mse = per_subcarrier_mse(np.concatenate(sent_syms), np.concatenate(data_syms))

            summary_rows.append((name, float(snr), feature_mse, psnr))
            subcarrier_rows.extend((name, float(snr), k, float(v)) for k, v in enumerate(mse))
            label = f"{name}_snr{_snr_label(snr)}"
            report.add(f"{label}_feature_mse", feature_mse)
            report.add(f"{label}_psnr", psnr, "dB")
            report.add(f"{label}_subcarrier_mse_variance", float(np.var(mse)))
            if min(blocks[0].height, blocks[0].width) >= MS_SSIM_MIN_SIDE:
                report.add(f"{label}_ms_ssim", ms_ssim_db(sent_arr[0, :, :, 0], received_arr[0, :, :, 0],
                                                          FEATURE_RANGE), "dB")
            logger.info("e2e %s SNR %s dB: feature MSE %.3e, PSNR %.2f dB", name, _snr_label(snr), feature_mse, psnr)

    return [
        _write_csv(config, out_dir / "e2e.csv", ("variant", "snr_db", "feature_mse", "psnr_db"), summary_rows),
        _write_csv(config, out_dir / "subcarrier_mse.csv", ("variant", "snr_db", "subcarrier", "mse"),
                   subcarrier_rows),
        report.to_yaml(out_dir / "e2e_summary.yaml"),
    ]


def run_schedule(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Budget tables plus feature error as trailing channels are dropped"""
    blocks = load_blocks(config)
    first = blocks[0]
    table = schedule_table(config.ofdm, config.budget.t_max_values, first.height, first.width,
                           first.num_channels, config.budget.bandwidths)
    schedule_rows = [(r["bandwidth"], r["t_max"], r["n_features"], r["channels"]) for r in table]

    snr = config.channel.snr_db[0]
    progressive_rows = []
    for kept in range(first.num_channels, 0, -1):
        errors = []
        for index, block in enumerate(blocks):
            realization = channel_realization(config, snr, index)
            outcome = run_link(drop_channels(block, kept), config, snr, index, realization=realization)
            restored = zero_fill(outcome.block, block.num_channels)
            errors.append(np.mean((restored.data - block.data) ** 2))
        progressive_rows.append((kept, float(np.mean(errors))))
        logger.info("Progressive: %d channels, feature MSE %.3e", kept, progressive_rows[-1][1])

    paths = [
        _write_csv(config, out_dir / "schedule.csv", ("bandwidth", "t_max", "n_features", "channels"),
                   schedule_rows),
        _write_csv(config, out_dir / "progressive.csv", ("channels", "feature_mse"), progressive_rows),
    ]
    if config.budget.masking:
        paths.append(_write_csv(config, out_dir / "masking.csv", ("channel", "feature_mse"),
                                _masking_rows(config, blocks, snr)))
    return paths


def _masking_rows(config: ExperimentConfig, blocks: List[FeatureBlock], snr: float) -> List[Tuple[int, float]]:
    """Feature error with one received channel zeroed at a time"""
    received = [run_link(block, config, snr, index).block for index, block in enumerate(blocks)]
    rows = []
    for channel in range(blocks[0].num_channels):
        errors = [np.mean((mask_channel(rx, channel).data - block.data) ** 2)
                  for rx, block in zip(received, blocks)]
        rows.append((channel, float(np.mean(errors))))
        logger.debug("Masked channel %d: feature MSE %.3e", channel, rows[-1][1])
    return rows


def pipeline_config(config: ExperimentConfig) -> PipelineConfig:
    s = config.stream
    return PipelineConfig(
        frame_rate=s.frame_rate,
        buffer_capacity=s.buffer_capacity,
        encode_time_model=StageTime(s.encode_time, s.encode_jitter),
        transmit_time_model=StageTime(s.transmit_time, s.transmit_jitter),
        n_frames=s.n_frames,
        mode=s.mode,
        decode_time_model=StageTime(s.decode_time),
        channel_wait_model=StageTime(s.channel_wait),
    )


def _modem_stages(config: ExperimentConfig) -> Tuple[StageFn, StageFn, StageFn]:
    """Encode a synthetic block, send it over the link, score the reconstruction"""
    spec = feature_spec(config)
    snr = config.channel.snr_db[0]
    sent: Dict[int, FeatureBlock] = {}

    def encode(index: int) -> Tuple[int, FeatureBlock]:
        block = generate_features(spec, derive_seed(config.seed, index))
        sent[index] = block
        return index, block

    def transmit(payload: Tuple[int, FeatureBlock]) -> Tuple[int, FeatureBlock]:
        index, block = payload
        return index, run_link(block, config, snr, index).block

    def decode(received: Tuple[int, FeatureBlock]) -> FrameQuality:
        index, block = received
        return frame_quality(sent.pop(index).data, block.data, FEATURE_RANGE)

    return encode, transmit, decode


def _quality_columns(outputs: List[FrameQuality]) -> Dict[str, List[Optional[float]]]:
    return {
        "feature_mse": [q.feature_mse for q in outputs],
        "psnr_db": [q.psnr_db for q in outputs],
        "ms_ssim_db": [q.ms_ssim_db for q in outputs],
    }


def run_stream(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Two-worker pipeline timing, optionally carrying real frames through the modem"""
    pipeline = pipeline_config(config)
    stages: Tuple[Optional[StageFn], ...] = (None, None, None)
    if config.stream.modem:
        stages = _modem_stages(config)

    report = run_pipeline(pipeline, *stages, seed=config.seed)
    summary = summarize_report(report, pipeline.frame_interval)

    metrics = _report(config)
    for key, value in summary.to_dict().items():
        metrics.add(key, float(value))
    quality = None
    if config.stream.modem and report.outputs:
        quality = _quality_columns(report.outputs)
        metrics.add("feature_mse", float(np.mean(quality["feature_mse"])))
        metrics.add("psnr", float(np.mean(quality["psnr_db"])), "dB")
        if all(value is not None for value in quality["ms_ssim_db"]):
            metrics.add("ms_ssim", float(np.mean(quality["ms_ssim_db"])), "dB")
    logger.info("Stream: max gap %.2f ms over %d frames", summary.max_gap * 1e3, summary.n_frames)

    return [
        report_to_csv(report, out_dir / "stream_events.csv", config.config_hash(), config.seed, quality),
        metrics.to_yaml(out_dir / "stream_summary.yaml"),
    ]


RUNNERS: Dict[str, Runner] = {
    "papr": run_papr,
    "correlation": run_correlation,
    "precode": run_precode,
    "e2e": run_e2e,
    "schedule": run_schedule,
    "stream": run_stream,
}


def run_experiment(config: ExperimentConfig, out_dir: Optional[Path] = None) -> List[Path]:
    """
    Run one experiment and write its artifacts

    Files created by a failed run are removed before the error propagates.

    Args:
        config: Validated experiment config
        out_dir: Output directory; defaults to config.resolve_output_dir()

    Returns:
        Paths of the written artifacts
    """
    out_dir = Path(out_dir) if out_dir is not None else config.resolve_output_dir()
    created_dir = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    before = set(out_dir.iterdir())

    logger.info("Running %s experiment (hash %s, seed %d) into %s",
                config.kind, config.config_hash(), config.seed, out_dir)
    try:
        return RUNNERS[config.kind](config, out_dir)
    except BaseException:
        for path in set(out_dir.iterdir()) - before:
            if path.is_file():
                path.unlink()
        if created_dir and not any(out_dir.iterdir()):
            os.rmdir(out_dir)
        raise
