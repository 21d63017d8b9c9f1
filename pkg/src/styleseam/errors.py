"""Exception hierarchy shared across the toolkit.

The CLI maps these (plus OSError) to exit code 2; anything else is an
internal failure (exit code 1).
"""


class StyleSeamError(Exception):
    """Base class for all toolkit errors."""


class FormatError(StyleSeamError):
    """A file or record does not conform to its declared format."""


class UsageError(StyleSeamError):
    """An operation was invoked in violation of its contract."""


class DataError(StyleSeamError):
    """Numerically invalid data, e.g. non-finite feature values."""


class CoverageError(StyleSeamError):
    """Prediction and truth sets do not cover the same documents/pairs."""
