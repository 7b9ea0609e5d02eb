"""Exception hierarchy shared by all modules."""


class ToricMLEError(Exception):
    """Base class for every error raised by this package."""


class MalformedInputError(ToricMLEError, ValueError):
    """Input does not describe a valid object (too few vertices, bad JSON, ...)."""


class DomainError(ToricMLEError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(DomainError):
    """A theorem hypothesis required by a solver is violated."""


class UnsupportedModelError(DomainError):
    """The requested model label is unknown or not handled by this routine."""


class GeometryError(ToricMLEError):
    """Internal inconsistency in lattice geometry (should not happen for valid input)."""


class ConvergenceError(ToricMLEError):
    """An iterative method did not converge.

    Attributes
    ----------
    last_iterate : object
        Final iterate reached before giving up.
    residual : float
        Residual norm at ``last_iterate``.
    """

    def __init__(self, message, last_iterate=None, residual=float("nan")):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class InconsistencyError(ToricMLEError):
    """No candidate solution passed the certificates.

    ``details`` holds every root and residual that was tried.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class GenericityError(ToricMLEError):
    """Too many random draws were non-generic."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}
