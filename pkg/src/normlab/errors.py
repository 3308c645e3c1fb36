"""Shared exception types."""


class NormlabError(Exception):
    """Base class for errors raised by this package."""


class NonFiniteError(NormlabError):
    """A tensor that must be finite contains NaN or Inf."""


class FormatError(NormlabError):
    """A binary file (dataset or checkpoint) does not match its format."""
