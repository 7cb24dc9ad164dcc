"""PAPR, correlation, symbol error and image quality metrics"""

from jscc_sim.metrics.papr import empirical_ccdf, empirical_cdf, papr_db, papr_per_symbol
from jscc_sim.metrics.quality import (
    MS_SSIM_MIN_SIDE,
    SATURATION_DB,
    FrameQuality,
    cross_subcarrier_correlation,
    frame_quality,
    is_saturated,
    ms_ssim,
    ms_ssim_db,
    ms_ssim_to_db,
    per_subcarrier_mse,
    psnr_db,
    weighted_loss,
)
from jscc_sim.metrics.report import MetricEntry, MetricsReport

__all__ = [
    "MS_SSIM_MIN_SIDE",
    "SATURATION_DB",
    "FrameQuality",
    "MetricEntry",
    "MetricsReport",
    "cross_subcarrier_correlation",
    "empirical_ccdf",
    "empirical_cdf",
    "frame_quality",
    "is_saturated",
    "ms_ssim",
    "ms_ssim_db",
    "ms_ssim_to_db",
    "papr_db",
    "papr_per_symbol",
    "per_subcarrier_mse",
    "psnr_db",
    "weighted_loss",
]
