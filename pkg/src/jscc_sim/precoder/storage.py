"""
Precoding matrix file format

    offset      size       field
    0           4          magic b"JPRC"
    4           4          K_d (uint32)
    8           16         config digest (ASCII hex, all zero when unknown)
    24          16*K_d^2   entries, row-major, (re, im) float64 pairs
    24+16*K_d^2 8          objective value (float64)
    +8          8          omega (float64)
    +16         4          initialization count N_r (uint32)

All fields little-endian. The digest covers the subcarrier plan and the
covariance settings the matrix was optimized for (see ``covariance_digest``).
"""

import logging
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from jscc_sim.core.artifacts import config_hash
from jscc_sim.core.errors import ConfigHashMismatchError, FormatError, InvalidArgumentError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.precoder.objective import PrecodingMatrix

logger = logging.getLogger(__name__)

MAGIC = b"JPRC"
HEADER = struct.Struct("<4sI16s")
TRAILER = struct.Struct("<ddI")
DIGEST_LENGTH = 16
NO_DIGEST = bytes(DIGEST_LENGTH)


def covariance_digest(config: OfdmConfig, coherence: int, form: str, p_t: float) -> str:
    """Hash of the subcarrier plan and covariance settings behind a matrix"""
    return config_hash({"ofdm": config.to_dict(), "coherence": int(coherence), "form": form, "p_t": float(p_t)})


def _encode_digest(digest: str) -> bytes:
    if not digest:
        return NO_DIGEST
    if len(digest) != DIGEST_LENGTH or any(c not in "0123456789abcdef" for c in digest):
        raise InvalidArgumentError(f"config digest must be {DIGEST_LENGTH} lowercase hex digits, got {digest!r}")
    return digest.encode("ascii")


def save_precoder(precoder: PrecodingMatrix, path: Union[str, Path], digest: str = "") -> None:
    """
    Persist a precoding matrix with the objective and settings that produced it

    Args:
        precoder: Matrix to store
        path: Output file
        digest: ``covariance_digest`` of the optimization settings, empty if unknown
    """
    size = precoder.size
    entries = np.ascontiguousarray(precoder.V, dtype="<c16").tobytes()
    trailer = TRAILER.pack(float(precoder.objective_value), float(precoder.omega), int(precoder.init_count))
    Path(path).write_bytes(HEADER.pack(MAGIC, size, _encode_digest(digest)) + entries + trailer)
    logger.debug("Saved %dx%d precoder to %s", size, size, path)


def _decode_digest(stored: bytes) -> str:
    return "" if stored == NO_DIGEST else stored.decode("ascii", errors="replace")


def load_precoder(path: Union[str, Path], expected_digest: Optional[str] = None) -> PrecodingMatrix:
    """
    Read a matrix written by ``save_precoder``

    Args:
        path: Matrix file
        expected_digest: When given, the stored digest must equal it

    Raises:
        FormatError: bad magic, zero size or truncated payload
        ConfigHashMismatchError: the matrix was optimized for other settings
    """
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise FormatError(f"{path}: file shorter than the {HEADER.size}-byte header")
    magic, size, stored = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if size == 0:
        raise FormatError(f"{path}: zero matrix size")

    body = 16 * size * size
    expected = HEADER.size + body + TRAILER.size
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(raw)}")

    if expected_digest is not None:
        found = _decode_digest(stored)
        if found != expected_digest:
            raise ConfigHashMismatchError(
                f"{path}: optimized for configuration {found or '(unknown)'}, expected {expected_digest}"
            )

    V = np.frombuffer(raw, dtype="<c16", count=size * size, offset=HEADER.size).reshape(size, size)
    objective, omega, init_count = TRAILER.unpack_from(raw, HEADER.size + body)
    return PrecodingMatrix(V=V.astype(np.complex128), objective_value=objective, omega=omega,
                           init_count=init_count)
