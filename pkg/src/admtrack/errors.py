"""Exception types shared across the package."""


class AdmTrackError(Exception):
    """Base class for all admtrack errors."""


class ParameterError(AdmTrackError, ValueError):
    """Invalid codec parameters, config values, or mismatched grids."""


class NumericError(AdmTrackError, ValueError):
    """Non-finite sample or state value fed into the codec."""


class SequencingError(AdmTrackError, RuntimeError):
    """Codec state used out of order or internally inconsistent."""


class DomainError(AdmTrackError, ValueError):
    """Argument outside the interval an operation is defined on."""

class FormatError(AdmTrackError, ValueError):
    """Malformed bitstream file, CSV, or config document."""


class DivergenceError(AdmTrackError, RuntimeError):
    """A forward scan exceeded its safety cap without terminating."""
