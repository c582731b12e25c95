"""Typed failures raised across the package."""


class SaddleKitError(Exception):
    """Base class for all package errors."""


class DomainError(SaddleKitError, ValueError):
    pass


class OrderTooSmallError(SaddleKitError, ValueError):
    pass


class VertexError(DomainError):
    pass


class SlitError(DomainError):
    pass


class DivergenceError(SaddleKitError, ArithmeticError):
    pass


class ToleranceNotMetError(SaddleKitError, ArithmeticError):
    """Quadrature gave up before reaching the requested tolerance."""

    def __init__(self, message: str, value=None, error: float = float("nan")):
        super().__init__(message)
        self.value = value
        self.error = error


class InsufficientPointsError(SaddleKitError, ValueError):
    pass


class IllConditionedFitError(SaddleKitError, ArithmeticError):
    pass


class HypothesisViolatedError(SaddleKitError, ValueError):
    """A vanishing hypothesis on the jet fails; ``which`` names the culprit."""

    def __init__(self, message: str, which: str = ""):
        super().__init__(message)
        self.which = which


class MissingDerivativeError(SaddleKitError, ValueError):
    pass


class NoLimitError(SaddleKitError, ArithmeticError):
    pass


class NoExitError(SaddleKitError, RuntimeError):
    pass


class DensityVanishesError(SaddleKitError, ZeroDivisionError):
    pass
