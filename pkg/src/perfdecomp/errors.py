"""Exception types shared across the package."""


class DecompError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DecompError):
    """Input trace or configuration failed validation."""


class StructuralError(DecompError):
    """Component/residual shapes are inconsistent."""


class InsufficientDataError(DecompError):
    """Not enough data points for the requested operation."""


class ZeroVarianceError(DecompError):
    """Operation undefined on a constant series."""


class NoPeriodError(DecompError):
    """Series does not cross its mean often enough to estimate a period."""


class NonExtrapolableError(DecompError):
    """Model family cannot be extended beyond the training range."""
