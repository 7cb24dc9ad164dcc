"""
Second-order statistics used by the precoder

The symbol covariance is estimated once over a training set of mapped
segments; the channel covariance is the banded 0/1 coherence mask over the
data subcarriers.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from jscc_sim.core.errors import (
    DegenerateCovarianceError,
    InsufficientDataError,
    InvalidArgumentError,
)
from jscc_sim.core.types import OfdmConfig

logger = logging.getLogger(__name__)

HERMITIAN = "hermitian"
PSEUDO = "pseudo"
CORRELATION_FORMS = (HERMITIAN, PSEUDO)


@dataclass
class SymbolCovariance:
    """
    Covariance of the complex data symbols

    ``matrix`` is the Hermitian covariance E{x x^H}. ``pseudo`` optionally
    holds the complementary covariance E{x x^T} when the correlation penalty
    should be computed on it instead.
    """
    matrix: np.ndarray
    sample_count: int = 0
    pseudo: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        n = self.matrix.shape[0] if self.matrix.ndim == 2 else -1
        if self.matrix.shape != (n, n) or n < 1:
            raise InvalidArgumentError(f"covariance must be square, got shape {self.matrix.shape}")
        if not np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=1e-10):
            raise DegenerateCovarianceError("covariance matrix is not Hermitian")
        if self.pseudo is not None:
            self.pseudo = np.asarray(self.pseudo, dtype=np.complex128)
            if self.pseudo.shape != self.matrix.shape:
                raise InvalidArgumentError("pseudo-covariance shape differs from covariance")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def is_psd(self) -> bool:
        """Minimum eigenvalue at least -1e-8 times the trace"""
        trace = float(np.real(np.trace(self.matrix)))
        min_eig = float(linalg.eigvalsh(self.matrix)[0])
        return min_eig >= -1e-8 * max(trace, 1.0)

    def correlation_source(self, form: str = HERMITIAN) -> np.ndarray:
        """Matrix whose congruence V M V^H (or V M V^T) drives the correlation penalty"""
        if form == HERMITIAN:
            return self.matrix
        if form == PSEUDO:
            if self.pseudo is None:
                raise InvalidArgumentError("pseudo-covariance was not estimated")
            return self.pseudo
        raise InvalidArgumentError(f"unknown correlation form {form!r}, expected one of {CORRELATION_FORMS}")


@dataclass
class ChannelCovariance:
    """Banded 0/1 coherence mask over the data subcarriers"""
    matrix: np.ndarray
    coherence: int

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def estimate_symbol_covariance(segments: np.ndarray) -> SymbolCovariance:
    """
    Sample covariance of complex symbol segments

    Args:
        segments: M x K_d complex array, one segment per row

    Returns:
        Mean-removed (1/M) sum x x^H, symmetrized, with the matching
        pseudo-covariance (1/M) sum x x^T
    """
    x = np.asarray(segments, dtype=np.complex128)
    if x.ndim != 2:
        raise InvalidArgumentError(f"expected an M x K_d array of segments, got shape {x.shape}")
    m = x.shape[0]
    if m < 2:
        raise InsufficientDataError(f"covariance needs at least 2 segments, got {m}")

    centered = x - x.mean(axis=0)
    cov = centered.T @ centered.conj() / m
    cov = 0.5 * (cov + cov.conj().T)
    pseudo = centered.T @ centered / m
    pseudo = 0.5 * (pseudo + pseudo.T)

    logger.debug("Estimated %dx%d symbol covariance from %d segments", cov.shape[0], cov.shape[1], m)
    return SymbolCovariance(matrix=cov, sample_count=m, pseudo=pseudo)


def banded_channel_covariance(config: OfdmConfig, coherence: int) -> ChannelCovariance:
    """
    Banded coherence mask: 1 where two data subcarriers are closer than K_c

    Distances use the signed frequency index, so bins on either side of DC
    are neighbours and the band edges are not.
    """
    K = config.n_subcarriers
    if not 1 <= coherence <= K:
        raise InvalidArgumentError(f"K_c must lie in [1, {K}], got {coherence}")
    freqs = np.array([config.frequency_index(i) for i in config.data_indices])
    distance = np.abs(freqs[:, None] - freqs[None, :])
    return ChannelCovariance(matrix=(distance < coherence).astype(np.float64), coherence=coherence)
