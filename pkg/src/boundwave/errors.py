"""Exception types shared across the package."""


class BoundwaveError(Exception):
    """Base class for all package errors."""


class DomainError(BoundwaveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(BoundwaveError, ValueError):
    """A run configuration violates a precondition (named in the message)."""


class CapacityError(BoundwaveError, RuntimeError):
    """A requested problem size exceeds the configured memory/CPU budget."""


class NumericalError(BoundwaveError, RuntimeError):
    """A computation produced non-finite or otherwise unusable values."""


class ConditioningError(NumericalError):
    """A linear solve was too ill-conditioned to trust."""


class PrecisionError(NumericalError):
    """An evaluation scheme ran out of significant digits."""
