"""Exception hierarchy shared across the package."""


class MedmargError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(MedmargError, ValueError):
    """A distribution parameter lies outside its valid range."""


class DomainError(MedmargError, ValueError):
    """An argument lies outside the domain of a function (e.g. p not in (0, 1))."""


class NumericalError(MedmargError, ArithmeticError):
    """A numerical routine failed. ``operation`` names the failing step."""

    def __init__(self, message, operation=None):
        super().__init__(message)
        self.operation = operation


class ConvergenceError(NumericalError):
    pass


class UnsupportedFamilyError(NumericalError):
    pass


class CalibrationError(NumericalError):
    pass


class EstimationError(NumericalError):
    pass
