"""
Row-by-row precoder optimization

Each sweep visits the rows of V in order. Row k is re-solved with the other
rows fixed, restricted to the orthogonal complement of the rows already
updated in this sweep and relaxed to the unit ball, then renormalized. The
row subproblem minimizes a smoothed objective (log-sum-exp peak power,
softened magnitudes) by projected gradient with Armijo backtracking. Sweeps
are accepted only while the true objective keeps improving.

Gradients follow the 2 * df/d(conj v) convention, which is the steepest
ascent direction of a real function of a complex vector.
"""

import logging
import multiprocessing as mp
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg

from jscc_sim.core.dft import random_unitary, truncated_dft_matrix
from jscc_sim.core.errors import DegenerateCovarianceError, InvalidArgumentError, InvalidPrecoderError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.precoder.covariance import (
    HERMITIAN,
    PSEUDO,
    ChannelCovariance,
    SymbolCovariance,
)
from jscc_sim.precoder.objective import MatrixLike, PrecodingMatrix, as_matrix, precoding_objective

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
SHRINK = 0.5
MAX_INNER_ITERATIONS = 100
MIN_STEP = 1e-12
INNER_RTOL = 1e-7


@dataclass
class _Problem:
    cov_x: SymbolCovariance
    cov_h: ChannelCovariance
    config: OfdmConfig
    p_t: float
    pilot_power: np.ndarray
    omega: float
    form: str
    beta: float
    max_sweeps: int
    tol: float

    def true_objective(self, V: np.ndarray) -> float:
        try:
            return precoding_objective(V, self.cov_x, self.cov_h, self.config, self.p_t,
                                       self.pilot_power, self.omega, self.form)
        except DegenerateCovarianceError:
            return float("inf")


class _RowObjective:
    """Smoothed objective of row k with every other row of V held fixed"""

    def __init__(self, problem: _Problem, V: np.ndarray, k: int, F: np.ndarray):
        C = problem.cov_x.matrix
        self.C = C
        self.omega = problem.omega
        self.p_t = problem.p_t
        self.beta = problem.beta
        self.pilot_power = problem.pilot_power

        # Correlation with the fixed rows: z_j(v) = v @ W[:, j]
        if problem.form == PSEUDO:
            self.W = problem.cov_x.correlation_source(PSEUDO) @ V.T
        else:
            self.W = C @ V.conj().T
        variances = np.real(np.einsum("ij,jk,ik->i", V, C, V.conj()))
        floor = 1e-14 * max(float(np.real(np.trace(C))), 1e-300)
        weights = np.where(variances > floor, problem.cov_h.matrix[k] / np.sqrt(np.maximum(variances, floor)), 0.0)
        weights[k] = 0.0
        self.weights = weights
        self.eps = 1e-6 * max(float(np.real(np.trace(C))) / C.shape[0], 1e-12)

        # Expected power: a_n = b_n + c_n v^H, p_n = p_t a_n^H C a_n + pilot_n
        self.c = F[k]
        self.c_power = np.abs(self.c) ** 2
        B = V.conj().T @ F - np.outer(V[k].conj(), F[k])
        self.Q = C @ B
        self.base = np.real(np.sum(B.conj() * self.Q, axis=0))

    def _parts(self, v: np.ndarray):
        vC = v @ self.C
        s = float(np.real(vC @ v.conj()))
        z = v @ self.W
        mag = np.sqrt(np.abs(z) ** 2 + self.eps ** 2)
        T = float(self.weights @ mag)
        power = self.p_t * (self.base + 2.0 * np.real(self.c.conj() * (v @ self.Q)) + self.c_power * s)
        power = power + self.pilot_power
        return vC, s, z, mag, T, power

    def _lse(self, power: np.ndarray) -> Tuple[float, np.ndarray]:
        shifted = self.beta * (power - np.max(power))
        w = np.exp(shifted)
        total = np.sum(w)
        return float(np.max(power) + np.log(total) / self.beta), w / total

    def value(self, v: np.ndarray) -> float:
        vC, s, z, mag, T, power = self._parts(v)
        if s <= 0:
            return float("inf")
        f = 2.0 * T / np.sqrt(s)
        if self.omega > 0:
            f += self.omega * self._lse(power)[0]
        return f

    def value_and_grad(self, v: np.ndarray) -> Tuple[float, np.ndarray]:
        vC, s, z, mag, T, power = self._parts(v)
        if s <= 0:
            return float("inf"), np.zeros_like(v)
        grad_s = 2.0 * vC
        grad_T = self.W.conj() @ (self.weights * z / mag)
        f = 2.0 * T / np.sqrt(s)
        grad = 2.0 * grad_T / np.sqrt(s) - T * s ** -1.5 * grad_s
        if self.omega > 0:
            lse, pi = self._lse(power)
            f += self.omega * lse
            grad_power = self.p_t * (2.0 * self.Q.conj() @ (pi * self.c) + grad_s * float(pi @ self.c_power))
            grad = grad + self.omega * grad_power
        return f, grad


def _project(v: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Orthogonal complement of the rows of U, then the unit ball"""
    if U.shape[0]:
        v = v - (v @ U.conj().T) @ U
    norm = np.linalg.norm(v)
    if norm > 1.0:
        v = v / norm
    return v


def _random_direction(U: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        v = _project(rng.standard_normal(size) + 1j * rng.standard_normal(size), U)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm


def _solve_row(row: _RowObjective, start: np.ndarray, U: np.ndarray,
               rng: np.random.Generator) -> np.ndarray:
    v = _project(start, U)
    if np.linalg.norm(v) < 1e-6:
        v = _random_direction(U, start.size, rng)

    f, g = row.value_and_grad(v)
    for _ in range(MAX_INNER_ITERATIONS):
        g_norm = np.linalg.norm(g)
        if not np.isfinite(f) or g_norm < 1e-12:
            break
        step = 1.0 / g_norm
        accepted = False
        while step > MIN_STEP:
            candidate = _project(v - step * g, U)
            decrease = float(np.real(np.vdot(g, candidate - v)))
            f_candidate = row.value(candidate)
            if f_candidate <= f + ARMIJO_C * decrease:
                accepted = True
                break
            step *= SHRINK
        if not accepted:
            break
        moved = np.linalg.norm(candidate - v)
        v = candidate
        f_previous = f
        f, g = row.value_and_grad(v)
        if moved < 1e-12 or f_previous - f <= INNER_RTOL * max(1.0, abs(f_previous)):
            break

    norm = np.linalg.norm(v)
    if norm < 1e-8:
        return _random_direction(U, start.size, rng)
    return v / norm


def closest_unitary(V: np.ndarray) -> np.ndarray:
    """Unitary polar factor of V (nearest unitary matrix in Frobenius norm)"""
    unitary, _ = linalg.polar(V)
    return unitary


def _sweep(problem: _Problem, V: np.ndarray, F: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    V = V.copy()
    for k in range(V.shape[0]):
        row = _RowObjective(problem, V, k, F)
        V[k] = _solve_row(row, V[k], V[:k], rng)
    return closest_unitary(V)


def _run_initialization(problem: _Problem, seed: np.random.SeedSequence) -> Tuple[np.ndarray, float, List[float]]:
    rng = np.random.default_rng(seed)
    F = truncated_dft_matrix(problem.config)
    V = random_unitary(problem.config.n_data, rng)
    best = problem.true_objective(V)
    history = [best]

    for _ in range(problem.max_sweeps):
        candidate = _sweep(problem, V, F, rng)
        value = problem.true_objective(candidate)
        if not value < best:
            break
        improvement = best - value
        V, best = candidate, value
        history.append(value)
        if improvement < problem.tol:
            break
    return V, best, history


def optimize_precoder(
    cov_x: SymbolCovariance,
    cov_h: ChannelCovariance,
    config: OfdmConfig,
    p_t: float,
    pilot_power: np.ndarray,
    omega: float,
    n_inits: int = 8,
    max_sweeps: int = 20,
    tol: float = 1e-6,
    seed: int = 0,
    form: str = HERMITIAN,
    beta: float = 50.0,
    workers: Optional[int] = None,
) -> PrecodingMatrix:
    """
    Optimize the unitary precoding matrix

    Args:
        cov_x: Symbol covariance (must be positive semidefinite)
        cov_h: Banded channel covariance
        config: OFDM configuration
        p_t: Data symbol power
        pilot_power: Time-domain pilot power per sample
        omega: Weight of the peak-power term
        n_inits: Number of random unitary initializations
        max_sweeps: Sweep limit per initialization
        tol: Stop once a sweep improves the objective by less than this
        seed: Base seed; initialization i uses the i-th spawned child
        form: ``hermitian`` or ``pseudo`` correlation penalty
        beta: Log-sum-exp temperature for the smoothed peak
        workers: Process count for running initializations in parallel

    Returns:
        Best candidate by the true objective; the identity is always a candidate
    """
    if n_inits < 1:
        raise InvalidArgumentError(f"need at least one initialization, got {n_inits}")
    if max_sweeps < 0:
        raise InvalidArgumentError(f"max_sweeps must be non-negative, got {max_sweeps}")
    if omega < 0:
        raise InvalidArgumentError(f"omega must be non-negative, got {omega}")
    if beta <= 0:
        raise InvalidArgumentError(f"beta must be positive, got {beta}")
    if form not in (HERMITIAN, PSEUDO):
        raise InvalidArgumentError(f"unknown correlation form {form!r}")
    if cov_x.size != config.n_data or cov_h.size != config.n_data:
        raise InvalidArgumentError(f"covariances must be {config.n_data}x{config.n_data}")
    if not cov_x.is_psd():
        raise DegenerateCovarianceError("symbol covariance is not positive semidefinite")
    if form == PSEUDO:
        cov_x.correlation_source(PSEUDO)

    problem = _Problem(
        cov_x=cov_x,
        cov_h=cov_h,
        config=config,
        p_t=p_t,
        pilot_power=np.asarray(pilot_power, dtype=np.float64),
        omega=omega,
        form=form,
        beta=beta,
        max_sweeps=max_sweeps,
        tol=tol,
    )

    identity = np.eye(config.n_data, dtype=np.complex128)
    identity_value = precoding_objective(identity, cov_x, cov_h, config, p_t, problem.pilot_power, omega, form)
    logger.info("Identity precoder objective: %.6f", identity_value)

    seeds = np.random.SeedSequence(seed).spawn(n_inits)
    if workers and workers > 1:
        with mp.Pool(processes=min(workers, n_inits)) as pool:
            results = pool.starmap(_run_initialization, [(problem, s) for s in seeds])
    else:
        results = [_run_initialization(problem, s) for s in seeds]

    best_V, best_value = identity, identity_value
    history = []
    for index, (V, value, trace) in enumerate(results):
        logger.info("Initialization %d/%d: objective %.6f after %d accepted sweeps",
                    index + 1, n_inits, value, len(trace) - 1)
        history.append(trace)
        if value < best_value:
            best_V, best_value = V, value

    if best_V is identity:
        logger.info("No initialization beat the identity precoder")

    return PrecodingMatrix(
        V=best_V,
        objective_value=best_value,
        omega=omega,
        init_count=n_inits,
        history=history,
    )


def _check_vector(V: np.ndarray, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 0 or x.shape[-1] != V.shape[1]:
        raise InvalidArgumentError(f"expected {V.shape[1]} symbols, got shape {x.shape}")
    return x


def apply_precoding(V: MatrixLike, x_d: np.ndarray) -> np.ndarray:
    """x^t = V x^d; a stack of symbol vectors along the last axis is precoded row by row"""
    matrix = as_matrix(V)
    return _check_vector(matrix, x_d) @ matrix.T


def invert_precoding(V: MatrixLike, x_hat: np.ndarray) -> np.ndarray:
    """
    V^H x_hat

    Raises:
        InvalidPrecoderError: V deviates from unitary by more than 1e-6
    """
    matrix = as_matrix(V)
    error = float(np.linalg.norm(matrix @ matrix.conj().T - np.eye(matrix.shape[0])))
    if error > 1e-6:
        raise InvalidPrecoderError(f"precoding matrix is not unitary (||VV^H - I||_F = {error:.3g})")
    return _check_vector(matrix, x_hat) @ matrix.conj()
