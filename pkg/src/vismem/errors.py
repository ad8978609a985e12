"""Exception types shared across the package.

Every error raised by vismem derives from ``VismemError`` so callers can
catch the whole family with one handler. The CLI maps subclasses to exit
codes (see ``vismem.cli``).
"""


class VismemError(Exception):
    """Base class for all vismem errors."""


class ConfigError(VismemError):
    """Invalid or inconsistent experiment configuration."""


class DuplicateIdError(VismemError):
    """An id appeared more than once where ids must be unique."""


class DimensionMismatchError(VismemError):
    """A vector's length does not match the expected dimension."""


class NoRecordsError(VismemError):
    """A nearest-neighbor query was issued against an empty store."""


class GridTooFineError(VismemError):
    """Downsample grid exceeds the image's pixel resolution."""


class BadMagicError(VismemError):
    """A binary file does not start with the expected magic bytes."""


class TruncatedFileError(VismemError):
    """A binary file ended before the declared record count was read."""


class ParseError(VismemError):
    """A text input (manifest line, config) could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class FractionError(VismemError):
    """Split fractions are negative or sum past 1."""


class ExhaustedImagesError(VismemError):
    """A stream needed a fresh image id but the pool was empty."""


class EmptyPairsError(VismemError):
    """forced_choice was called with no trial pairs."""


class EmptyCalibrationSetError(VismemError):
    """Threshold calibration received an empty seen or novel set."""


class DegenerateCalibrationError(VismemError):
    """Calibration produced mean_seen >= mean_novel; the threshold is unusable."""


class InsufficientDataError(VismemError):
    """Not enough samples (or too few dimensions) to fit the requested model."""


class DegenerateVarianceError(VismemError):
    """All points are identical; principal axes are undefined."""


class ExternalUnavailableError(VismemError):
    """An external encoder (file or subprocess) could not serve a request."""


class ProtocolViolationError(VismemError):
    """A stdio encoder peer sent a malformed or unexpected message."""
