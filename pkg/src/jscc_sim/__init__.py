"""jscc-sim - OFDM baseband simulator for deep joint source-channel coding"""

from jscc_sim.__version__ import __version__

__author__ = "jscc-sim developers"
__license__ = "MIT"

from jscc_sim.core.errors import JsccSimError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.features.source import FeatureBlock, FeatureSpec
from jscc_sim.precoder.objective import PrecodingMatrix

__all__ = [
    "FeatureBlock",
    "FeatureSpec",
    "JsccSimError",
    "OfdmConfig",
    "PrecodingMatrix",
    "__version__",
]
