"""Feature source: synthetic encoder stand-in, activation, quantization and file I/O"""

from jscc_sim.features.source import (
    FeatureBlock,
    FeatureSpec,
    clip_activation,
    empirical_feature_correlation,
    flatten_channel_major,
    generate_features,
    generate_raw_features,
    lag_correlation,
    quantize_half,
    unflatten_channel_major,
)
from jscc_sim.features.storage import load_features, save_features

__all__ = [
    "FeatureBlock",
    "FeatureSpec",
    "clip_activation",
    "empirical_feature_correlation",
    "flatten_channel_major",
    "generate_features",
    "generate_raw_features",
    "lag_correlation",
    "quantize_half",
    "unflatten_channel_major",
    "load_features",
    "save_features",
]
