"""Shared exception types."""


class MaxlensError(Exception):
    """Base class for errors raised by this package."""


class IngestError(MaxlensError):
    """CSV parsing or validation failed; the message carries row/column context."""


class InvalidConstraintError(MaxlensError):
    """Constraint parameters are unusable (empty row set, zero direction, ...)."""


class StaleModelError(MaxlensError):
    """A view or transform was requested against an out-of-date model."""


class FitInProgressError(MaxlensError):
    """A second fit was requested while one is already running."""


class UnknownGroupingError(MaxlensError, KeyError):
    """Requested a saved grouping that does not exist."""


class DegenerateDataError(MaxlensError):
    """Data does not support the requested computation (too few rows, no variance)."""
