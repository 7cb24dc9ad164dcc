"""
Reconstruction quality: symbol errors, PSNR, MS-SSIM and the weighted loss

Zero-error cases saturate at SATURATION_DB instead of returning infinity.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import convolve2d

from jscc_sim.core.errors import InsufficientDataError, InvalidArgumentError

logger = logging.getLogger(__name__)

SATURATION_DB = 100.0

MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03
# Smallest image side the five-scale pyramid accepts
MS_SSIM_MIN_SIDE = WINDOW_SIZE * 2 ** (len(MS_SSIM_WEIGHTS) - 1)


def is_saturated(value_db: float) -> bool:
    return value_db >= SATURATION_DB


def cross_subcarrier_correlation(received_blocks: np.ndarray) -> np.ndarray:
    """
    |Pearson correlation| between every pair of subcarrier sequences

    Args:
        received_blocks: M x K_d complex array, one block per row

    Returns:
        K_d x K_d symmetric matrix with unit diagonal. Rows and columns of
        zero-variance subcarriers are zero off the diagonal (and logged).
    """
    x = np.asarray(received_blocks, dtype=np.complex128)
    if x.ndim != 2:
        raise InvalidArgumentError(f"expected an M x K_d array, got shape {x.shape}")
    if x.shape[0] < 2:
        raise InsufficientDataError(f"correlation needs at least 2 blocks, got {x.shape[0]}")

    centered = x - x.mean(axis=0)
    cov = centered.T @ centered.conj() / x.shape[0]
    variances = np.real(np.diag(cov))
    flat = variances <= 0
    if np.any(flat):
        logger.warning("Zero-variance subcarrier(s) %s in correlation matrix", np.flatnonzero(flat).tolist())

    safe = np.where(flat, 1.0, variances)
    corr = np.abs(cov) / np.sqrt(np.outer(safe, safe))
    corr[flat, :] = 0.0
    corr[:, flat] = 0.0
    corr = np.minimum(0.5 * (corr + corr.T), 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def per_subcarrier_mse(tx_symbols: np.ndarray, rx_symbols: np.ndarray) -> np.ndarray:
    """Mean |tx - rx|^2 per data-symbol position across blocks"""
    tx = np.atleast_2d(np.asarray(tx_symbols, dtype=np.complex128))
    rx = np.atleast_2d(np.asarray(rx_symbols, dtype=np.complex128))
    if tx.shape != rx.shape:
        raise InvalidArgumentError(f"shape mismatch: {tx.shape} vs {rx.shape}")
    return np.mean(np.abs(tx - rx) ** 2, axis=0)


def psnr_db(a: np.ndarray, b: np.ndarray, max_value: float) -> float:
    """
    10 log10(max_value^2 / MSE), clamped at SATURATION_DB

    Raises:
        InvalidArgumentError: shape mismatch or non-positive max_value
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise InvalidArgumentError(f"shape mismatch: {x.shape} vs {y.shape}")
    if max_value <= 0:
        raise InvalidArgumentError(f"max_value must be positive, got {max_value}")
    mse = float(np.mean((x - y) ** 2)) if x.size else 0.0
    if mse == 0.0:
        logger.info("PSNR saturated at %.0f dB (zero error)", SATURATION_DB)
        return SATURATION_DB
    return float(min(SATURATION_DB, 10.0 * np.log10(max_value ** 2 / mse)))


def _gaussian_window() -> np.ndarray:
    offsets = np.arange(WINDOW_SIZE) - (WINDOW_SIZE - 1) / 2.0
    g = np.exp(-(offsets ** 2) / (2.0 * WINDOW_SIGMA ** 2))
    g /= g.sum()
    return np.outer(g, g)


def _ssim_components(x: np.ndarray, y: np.ndarray, window: np.ndarray, c1: float, c2: float):
    def filt(img: np.ndarray) -> np.ndarray:
        return convolve2d(img, window, mode="valid")

    mu_x, mu_y = filt(x), filt(y)
    sigma_x = filt(x * x) - mu_x * mu_x
    sigma_y = filt(y * y) - mu_y * mu_y
    sigma_xy = filt(x * y) - mu_x * mu_y
    cs_map = (2.0 * sigma_xy + c2) / (sigma_x + sigma_y + c2)
    luminance = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1)
    return float(np.mean(luminance * cs_map)), float(np.mean(cs_map))


def _downsample(img: np.ndarray) -> np.ndarray:
    h, w = (img.shape[0] // 2) * 2, (img.shape[1] // 2) * 2
    return img[:h, :w].reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def ms_ssim(a: np.ndarray, b: np.ndarray, max_value: float = 2.0) -> float:
    """
    Five-scale MS-SSIM with an 11x11 Gaussian window (sigma 1.5)

    Args:
        a, b: Equal-shape 2-D images, at least 176 pixels on each side
        max_value: Dynamic range L (2.0 for features in [-1, 1])

    Returns:
        Index in [0, 1]; negative contrast terms are clamped to zero
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 2:
        raise InvalidArgumentError(f"expected equal-shape 2-D images, got {x.shape} and {y.shape}")
    levels = len(MS_SSIM_WEIGHTS)
    if min(x.shape) < MS_SSIM_MIN_SIDE:
        raise InvalidArgumentError(f"images must be at least {MS_SSIM_MIN_SIDE} pixels per side, got {x.shape}")
    if max_value <= 0:
        raise InvalidArgumentError(f"max_value must be positive, got {max_value}")

    window = _gaussian_window()
    c1 = (K1 * max_value) ** 2
    c2 = (K2 * max_value) ** 2
    result = 1.0
    for level, weight in enumerate(MS_SSIM_WEIGHTS):
        ssim, cs = _ssim_components(x, y, window, c1, c2)
        if level == levels - 1:
            result *= max(ssim, 0.0) ** weight
        else:
            result *= max(cs, 0.0) ** weight
            x, y = _downsample(x), _downsample(y)
    return float(result)


def ms_ssim_to_db(value: float) -> float:
    """-10 log10(1 - MS-SSIM), clamped at SATURATION_DB"""
    if not 0.0 <= value <= 1.0 + 1e-12:
        raise InvalidArgumentError(f"MS-SSIM must lie in [0, 1], got {value}")
    remainder = 1.0 - value
    if remainder <= 10.0 ** (-SATURATION_DB / 10.0):
        return SATURATION_DB
    return float(-10.0 * np.log10(remainder))


def ms_ssim_db(a: np.ndarray, b: np.ndarray, max_value: float = 2.0) -> float:
    """MS-SSIM expressed in dB"""
    value_db = ms_ssim_to_db(ms_ssim(a, b, max_value))
    if is_saturated(value_db):
        logger.info("MS-SSIM saturated at %.0f dB", SATURATION_DB)
    return value_db


def weighted_loss(mse: float, papr_linear: float, alpha: float) -> float:
    """alpha * mse + (1 - alpha) * papr"""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidArgumentError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * mse + (1.0 - alpha) * papr_linear


@dataclass
class FrameQuality:
    """Reconstruction quality of one streamed frame"""
    feature_mse: float
    psnr_db: float
    ms_ssim_db: Optional[float] = None


def frame_quality(sent: np.ndarray, received: np.ndarray, max_value: float = 2.0) -> FrameQuality:
    """
    Error, PSNR and MS-SSIM of one H x W x C feature frame

    MS-SSIM is averaged over channels and left as None when H or W is below
    MS_SSIM_MIN_SIDE.
    """
    x = np.asarray(sent, dtype=np.float64)
    y = np.asarray(received, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 3:
        raise InvalidArgumentError(f"expected equal-shape H x W x C frames, got {x.shape} and {y.shape}")
    quality = FrameQuality(feature_mse=float(np.mean((x - y) ** 2)), psnr_db=psnr_db(x, y, max_value))
    if min(x.shape[:2]) >= MS_SSIM_MIN_SIDE:
        value = np.mean([ms_ssim(x[:, :, c], y[:, :, c], max_value) for c in range(x.shape[2])])
        quality.ms_ssim_db = ms_ssim_to_db(float(value))
    return quality
