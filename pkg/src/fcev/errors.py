"""Exception types shared across the package."""


class FcevError(Exception):
    """Base class for all errors raised by :mod:`fcev`."""


class DomainError(FcevError, ValueError):
    """An argument lies outside the domain of the function or model.

    ``field`` names the offending parameter when one can be identified.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ConvergenceError(FcevError, ArithmeticError):
    """A series, continued fraction or quadrature did not converge."""


class NumericalOverflow(FcevError, OverflowError):
    """An intermediate quantity left the representable range."""
