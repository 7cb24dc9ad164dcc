"""Cross-subcarrier precoding: covariance estimation, objective, optimizer and persistence"""

from jscc_sim.precoder.covariance import (
    ChannelCovariance,
    SymbolCovariance,
    banded_channel_covariance,
    estimate_symbol_covariance,
)
from jscc_sim.precoder.objective import (
    PrecodingMatrix,
    expected_ofdm_power,
    normalized_omega,
    objective_terms,
    pilot_time_power,
    precoding_objective,
)
from jscc_sim.precoder.optimizer import apply_precoding, invert_precoding, optimize_precoder
from jscc_sim.precoder.storage import covariance_digest, load_precoder, save_precoder

__all__ = [
    "ChannelCovariance",
    "SymbolCovariance",
    "PrecodingMatrix",
    "banded_channel_covariance",
    "estimate_symbol_covariance",
    "expected_ofdm_power",
    "normalized_omega",
    "objective_terms",
    "pilot_time_power",
    "precoding_objective",
    "optimize_precoder",
    "apply_precoding",
    "invert_precoding",
    "save_precoder",
    "load_precoder",
    "covariance_digest",
]
