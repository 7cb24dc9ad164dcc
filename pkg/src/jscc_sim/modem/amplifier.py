"""Memoryless soft-limiter power amplifier"""

import numpy as np

from jscc_sim.core.errors import InvalidArgumentError

DEFAULT_BACKOFF = 2.0


def pa_soft_clip(samples: np.ndarray, clip_amplitude: float) -> np.ndarray:
    """
    Limit every sample magnitude to ``clip_amplitude``, keeping its phase

    Samples already inside the limit pass through unchanged.
    """
    if clip_amplitude <= 0:
        raise InvalidArgumentError(f"clip amplitude must be positive, got {clip_amplitude}")
    v = np.asarray(samples, dtype=np.complex128)
    magnitude = np.abs(v)
    over = magnitude > clip_amplitude
    out = v.copy()
    out[over] = v[over] * (clip_amplitude / magnitude[over])
    return out


def pa_backoff_amplitude(samples: np.ndarray, backoff: float = DEFAULT_BACKOFF) -> float:
    """Clip amplitude = backoff x RMS of the ideal waveform (2.0 is about 6 dB back-off)"""
    if backoff <= 0:
        raise InvalidArgumentError(f"backoff must be positive, got {backoff}")
    v = np.asarray(samples, dtype=np.complex128)
    rms = float(np.sqrt(np.mean(np.abs(v) ** 2))) if v.size else 0.0
    if rms == 0.0:
        raise InvalidArgumentError("cannot derive a clip level from a zero waveform")
    return backoff * rms
