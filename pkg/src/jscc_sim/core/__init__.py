"""
Shared numeric types, errors, DFT utilities and artifact stamping
"""

from .artifacts import config_hash, derive_seed, read_artifact_stamp, verify_artifact, write_csv, write_yaml
from .dft import dft_matrix, random_unitary, truncated_dft_matrix, unitary_dft, unitary_idft
from .errors import JsccSimError
from .types import OfdmConfig

__all__ = [
    'OfdmConfig',
    'JsccSimError',
    'unitary_dft',
    'unitary_idft',
    'dft_matrix',
    'truncated_dft_matrix',
    'random_unitary',
    'config_hash',
    'derive_seed',
    'write_csv',
    'write_yaml',
    'read_artifact_stamp',
    'verify_artifact',
]
