"""
Feature tensor file format

16-byte header followed by the payload:

    offset  size  field
    0       2     magic b"JF"
    2       2     format version (uint16, currently 1)
    4       4     H (uint32)
    8       4     W (uint32)
    12      4     C (uint32)
    16      4*HWC values, float32, row-major over (H, W, C)

All integers and floats are little-endian.
"""

import struct
from pathlib import Path
from typing import Union

import numpy as np

from jscc_sim.core.errors import FeatureFormatError
from jscc_sim.features.source import FeatureBlock

MAGIC = b"JF"
VERSION = 1
HEADER = struct.Struct("<2sHIII")


def save_features(block: FeatureBlock, path: Union[str, Path]) -> None:
    """
    Write a feature tensor

    Args:
        block: Tensor to store (values are narrowed to float32)
        path: Destination file
    """
    block.check_range()
    header = HEADER.pack(MAGIC, VERSION, block.height, block.width, block.num_channels)
    payload = np.ascontiguousarray(block.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def load_features(path: Union[str, Path]) -> FeatureBlock:
    """
    Read a feature tensor written by ``save_features`` or an external exporter

    Raises:
        FeatureFormatError: bad magic/version, zero dimension or wrong payload size
        FeatureRangeError: a value outside [-1, 1]
    """
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise FeatureFormatError(f"{path}: file shorter than the {HEADER.size}-byte header")

    magic, version, height, width, channels = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FeatureFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FeatureFormatError(f"{path}: unsupported version {version}")
    if min(height, width, channels) == 0:
        raise FeatureFormatError(f"{path}: zero dimension in header {(height, width, channels)}")

    expected = HEADER.size + 4 * height * width * channels
    if len(raw) != expected:
        raise FeatureFormatError(f"{path}: expected {expected} bytes, found {len(raw)}")

    values = np.frombuffer(raw, dtype="<f4", offset=HEADER.size)
    block = FeatureBlock(values.reshape(height, width, channels).astype(np.float64))
    block.check_range()
    return block
