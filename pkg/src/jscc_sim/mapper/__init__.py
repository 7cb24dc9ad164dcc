"""Feature-to-symbol mapping, power normalization and segmentation"""

from jscc_sim.mapper.symbol_mapper import (
    SegmentLayout,
    SymbolSegment,
    inverse_map,
    map_to_symbols,
    naive_inverse_map,
    naive_map,
    power_normalize,
    segment_features,
    unnormalize,
    unsegment_features,
)

__all__ = [
    "SegmentLayout",
    "SymbolSegment",
    "inverse_map",
    "map_to_symbols",
    "naive_inverse_map",
    "naive_map",
    "power_normalize",
    "segment_features",
    "unnormalize",
    "unsegment_features",
]
