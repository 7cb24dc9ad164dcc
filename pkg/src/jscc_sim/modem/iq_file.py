"""
Frame I/Q sample files

Samples are stored as interleaved little-endian float32 I/Q pairs. A YAML
sidecar next to the sample file (``<name>.yaml``) records what the receiver
needs to interpret them.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from jscc_sim.core.errors import ConfigHashMismatchError, FormatError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.modem.frame import FrameMetadata, OfdmFrame

logger = logging.getLogger(__name__)

SAMPLE_FORMAT = "cf32_le"


def sidecar_path(path: Union[str, Path]) -> Path:
    return Path(path).with_suffix(".yaml")


def write_iq_frame(frame: OfdmFrame, path: Union[str, Path], config: OfdmConfig) -> Path:
    """
    Write frame samples and their metadata sidecar

    Returns:
        Path of the sidecar
    """
    path = Path(path)
    interleaved = np.empty(2 * frame.time_samples.size, dtype="<f4")
    interleaved[0::2] = frame.time_samples.real
    interleaved[1::2] = frame.time_samples.imag
    path.write_bytes(interleaved.tobytes())

    record = {
        "format": SAMPLE_FORMAT,
        "config_digest": config.config_digest(),
        "sample_count": int(frame.time_samples.size),
        "n_payload_symbols": int(frame.n_payload_symbols),
        "pad_count": int(frame.metadata.pad_count),
        "scale": float(frame.metadata.scale),
        "kept_channels": int(frame.metadata.kept_channels),
    }
    sidecar = sidecar_path(path)
    sidecar.write_text(yaml.safe_dump(record, sort_keys=True))
    logger.info("Wrote %d samples to %s", frame.time_samples.size, path)
    return sidecar


def read_iq_frame(path: Union[str, Path], config: Optional[OfdmConfig] = None) -> OfdmFrame:
    """
    Read a frame written by ``write_iq_frame``

    Args:
        path: Sample file
        config: When given, the sidecar digest must match it

    Raises:
        FormatError: missing/invalid sidecar or sample count mismatch
        ConfigHashMismatchError: sidecar was written for another configuration
    """
    path = Path(path)
    sidecar = sidecar_path(path)
    if not sidecar.exists():
        raise FormatError(f"{path}: metadata sidecar {sidecar.name} not found")
    record = yaml.safe_load(sidecar.read_text())
    if not isinstance(record, dict) or record.get("format") != SAMPLE_FORMAT:
        raise FormatError(f"{sidecar}: not an I/Q frame record")

    if config is not None and record.get("config_digest") != config.config_digest():
        raise ConfigHashMismatchError(
            f"{path}: written for configuration {record.get('config_digest')}, "
            f"expected {config.config_digest()}"
        )

    raw = path.read_bytes()
    count = int(record.get("sample_count", -1))
    if len(raw) != 8 * count:
        raise FormatError(f"{path}: expected {8 * count} bytes, found {len(raw)}")
    interleaved = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    samples = interleaved[0::2] + 1j * interleaved[1::2]

    metadata = FrameMetadata(
        pad_count=int(record.get("pad_count", 0)),
        scale=float(record.get("scale", 1.0)),
        kept_channels=int(record.get("kept_channels", 0)),
        config_digest=str(record.get("config_digest", "")),
    )
    return OfdmFrame(time_samples=samples, n_payload_symbols=int(record["n_payload_symbols"]),
                     metadata=metadata)
