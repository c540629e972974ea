"""Exception hierarchy shared by every module."""


class ATDMError(Exception):
    """Base class for all errors raised by the package."""


class NonPositiveGammaArgument(ATDMError, ValueError):
    pass


class NoConvergence(ATDMError, ArithmeticError):
    pass


class SingularEvaluation(ATDMError, ZeroDivisionError):
    pass


class InvalidExponent(ATDMError, ValueError):
    pass


class NonIntegerExponent(ATDMError, ValueError):
    pass


class InvalidSPower(ATDMError, ValueError):
    pass


class MissingInitialData(ATDMError, ValueError):
    pass


class InsufficientComponents(ATDMError, IndexError):
    pass


class DivergentComponent(ATDMError, ArithmeticError):
    pass


class NoCalibration(ATDMError, RuntimeError):
    pass


class SpecParseError(ATDMError, ValueError):
    """A problem-spec file or a series literal could not be parsed."""
