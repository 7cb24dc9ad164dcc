"""Exception hierarchy for jscc-sim"""


class JsccSimError(Exception):
    """Base class for all simulator errors"""


class InvalidArgumentError(JsccSimError, ValueError):
    """Argument outside the operation's domain (wrong length, range or shape)"""


class ConfigError(JsccSimError, ValueError):
    """Inconsistent OFDM or experiment configuration"""


class FormatError(JsccSimError, ValueError):
    """Malformed binary artifact (feature tensor, precoder or I/Q file)"""


class FeatureFormatError(FormatError):
    """Malformed feature tensor file"""


class FeatureRangeError(JsccSimError, ValueError):
    """Feature values outside [-1, 1]"""


class InfeasibleBudgetError(JsccSimError, ValueError):
    """Latency budget leaves no time after the preamble"""


class UndefinedCorrelationError(JsccSimError, ValueError):
    """Correlation requested for a zero-variance sequence"""


class InsufficientDataError(JsccSimError, ValueError):
    """Too few samples for a statistical estimate"""


class DegenerateCovarianceError(JsccSimError, ValueError):
    """Covariance with zero-variance diagonal or not positive semidefinite"""


class InvalidPrecoderError(JsccSimError, ValueError):
    """Precoding matrix is not unitary or its file is malformed"""


class FrameError(JsccSimError, ValueError):
    """Received sample stream does not match the frame structure"""


class DelaySpreadError(JsccSimError, ValueError):
    """Channel delay spread exceeds the cyclic prefix"""


class UndefinedMetricError(JsccSimError, ValueError):
    """Metric is undefined for the given input (e.g. zero-power signal)"""


class EmptyReportError(JsccSimError, ValueError):
    """Summary requested for a pipeline report with no frames"""


class ConfigHashMismatchError(JsccSimError):
    """Artifact was produced by a different configuration"""
