"""
Precoding objective: correlation penalty plus weighted peak expected power
"""

from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np

from jscc_sim.core.dft import truncated_dft_matrix, unitary_idft
from jscc_sim.core.errors import DegenerateCovarianceError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.precoder.covariance import (
    HERMITIAN,
    PSEUDO,
    ChannelCovariance,
    SymbolCovariance,
)


@dataclass
class PrecodingMatrix:
    """Unitary K_d x K_d precoder with the objective it achieved"""
    V: np.ndarray
    objective_value: float = 0.0
    omega: float = 0.0
    init_count: int = 0
    # Accepted-sweep objective values, one list per random initialization
    history: List[List[float]] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        self.V = np.asarray(self.V, dtype=np.complex128)
        if self.V.ndim != 2 or self.V.shape[0] != self.V.shape[1]:
            raise InvalidArgumentError(f"precoding matrix must be square, got shape {self.V.shape}")

    @property
    def size(self) -> int:
        return self.V.shape[0]

    def unitarity_error(self) -> float:
        """||V V^H - I||_F"""
        return float(np.linalg.norm(self.V @ self.V.conj().T - np.eye(self.size)))

    @classmethod
    def identity(cls, size: int) -> "PrecodingMatrix":
        return cls(V=np.eye(size, dtype=np.complex128))


MatrixLike = Union[PrecodingMatrix, np.ndarray]


def as_matrix(V: MatrixLike) -> np.ndarray:
    if isinstance(V, PrecodingMatrix):
        return V.V
    return np.asarray(V, dtype=np.complex128)


def pilot_time_power(config: OfdmConfig, p_pilot: float = 1.0) -> np.ndarray:
    """
    Time-domain power of the pilot-only OFDM symbol

    Pilots are deterministic, so their contribution to the expected sample
    power is exactly |IDFT(pilots)|^2.
    """
    if p_pilot < 0:
        raise InvalidArgumentError(f"pilot power must be non-negative, got {p_pilot}")
    spectrum = np.zeros(config.n_subcarriers, dtype=np.complex128)
    if config.n_pilots:
        spectrum[list(config.pilot_indices)] = np.sqrt(p_pilot) * np.array(config.pilot_values)
    return np.abs(unitary_idft(spectrum)) ** 2


def _check_dimensions(V: np.ndarray, cov: SymbolCovariance, config: OfdmConfig,
                      pilot_power: np.ndarray) -> None:
    k_d = config.n_data
    if V.shape != (k_d, k_d):
        raise InvalidArgumentError(f"precoder shape {V.shape} does not match K_d={k_d}")
    if cov.size != k_d:
        raise InvalidArgumentError(f"covariance size {cov.size} does not match K_d={k_d}")
    if pilot_power.shape != (config.n_subcarriers,):
        raise InvalidArgumentError(
            f"pilot power must have length {config.n_subcarriers}, got shape {pilot_power.shape}"
        )


def expected_ofdm_power(V: MatrixLike, cov: SymbolCovariance, config: OfdmConfig, p_t: float,
                        pilot_power: np.ndarray) -> np.ndarray:
    """
    Expected power of each time-domain sample of a payload OFDM symbol

    Args:
        V: Precoding matrix
        cov: Symbol covariance
        config: OFDM configuration
        p_t: Data symbol power
        pilot_power: Deterministic pilot power per sample (see ``pilot_time_power``)

    Returns:
        Length-K vector p_t * f_k^H (V C V^H) f_k + pilot_power[k]
    """
    V = as_matrix(V)
    pilot_power = np.asarray(pilot_power, dtype=np.float64)
    _check_dimensions(V, cov, config, pilot_power)
    F = truncated_dft_matrix(config)
    R = V @ cov.matrix @ V.conj().T
    data_power = np.real(np.einsum("ik,ij,jk->k", F.conj(), R, F))
    return p_t * data_power + pilot_power


def correlation_penalty(V: np.ndarray, cov_x: SymbolCovariance, cov_h: ChannelCovariance,
                        form: str = HERMITIAN) -> float:
    """Sum over the coherence band of |normalized covariance| after precoding"""
    R = V @ cov_x.matrix @ V.conj().T
    variances = np.real(np.diag(R))
    if np.max(variances) <= 0 or np.min(variances) <= 1e-14 * np.max(variances):
        raise DegenerateCovarianceError("precoded symbol covariance has a zero-variance subcarrier")

    if form == PSEUDO:
        R = V @ cov_x.correlation_source(PSEUDO) @ V.T
    elif form != HERMITIAN:
        cov_x.correlation_source(form)

    normalized = np.abs(R) / np.sqrt(np.outer(variances, variances))
    np.fill_diagonal(normalized, 1.0)
    return float(np.sum(cov_h.matrix * normalized))


def objective_terms(V: MatrixLike, cov_x: SymbolCovariance, cov_h: ChannelCovariance,
                    config: OfdmConfig, p_t: float, pilot_power: np.ndarray,
                    form: str = HERMITIAN) -> Tuple[float, float]:
    """(correlation penalty, peak expected sample power)"""
    V = as_matrix(V)
    if cov_h.size != config.n_data:
        raise InvalidArgumentError(f"channel covariance size {cov_h.size} does not match K_d={config.n_data}")
    peak = float(np.max(expected_ofdm_power(V, cov_x, config, p_t, pilot_power)))
    return correlation_penalty(V, cov_x, cov_h, form), peak


def precoding_objective(V: MatrixLike, cov_x: SymbolCovariance, cov_h: ChannelCovariance,
                        config: OfdmConfig, p_t: float, pilot_power: np.ndarray, omega: float,
                        form: str = HERMITIAN) -> float:
    """
    Correlation penalty plus omega times the peak expected sample power

    Raises:
        DegenerateCovarianceError: a precoded subcarrier has zero variance
    """
    if omega < 0:
        raise InvalidArgumentError(f"omega must be non-negative, got {omega}")
    correlation, peak = objective_terms(V, cov_x, cov_h, config, p_t, pilot_power, form)
    return correlation + omega * peak


def normalized_omega(omega: float, cov_x: SymbolCovariance, cov_h: ChannelCovariance,
                     config: OfdmConfig, p_t: float, pilot_power: np.ndarray,
                     form: str = HERMITIAN) -> float:
    """
    Rescale a relative weight so omega = 1 balances both terms at V = I

    Returns omega unchanged when the identity has zero peak power.
    """
    if omega < 0:
        raise InvalidArgumentError(f"omega must be non-negative, got {omega}")
    identity = np.eye(config.n_data, dtype=np.complex128)
    correlation, peak = objective_terms(identity, cov_x, cov_h, config, p_t, pilot_power, form)
    if peak <= 0:
        return omega
    return omega * correlation / peak
