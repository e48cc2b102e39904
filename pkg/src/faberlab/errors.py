"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


class NotOnBoundaryError(DomainError):
    """Point has no preimage on the unit circle within tolerance."""


class PoleError(DomainError):
    """Evaluation too close to a pole of a rational model."""


class UnsupportedCaseError(DomainError):
    """Configuration outside the cases this package handles."""


class NumericError(ArithmeticError):
    """A numerical procedure did not reach its accuracy target."""


class QuadratureError(NumericError):
    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved relative error {achieved:.3e})")
        self.achieved = achieved


class ExtractionError(NumericError):
    def __init__(self, residual):
        super().__init__(f"Laurent extraction disagrees with the evaluator: max residual {residual:.3e}")
        self.residual = residual


class ConvergenceError(NumericError):
    """Newton or root iteration failed to converge."""


class PrecisionError(NumericError):
    """Not enough Laurent coefficients for the requested degree."""

    def __init__(self, needed, available):
        super().__init__(f"truncation K={available} too small; need K >= {needed}")
        self.needed = needed
        self.available = available


class IllConditionedContourError(NumericError):
    """The evaluation point lies on (or numerically near) the contour image."""


class UnderflowError(NumericError):
    """Normalizing constant too small to divide by."""


class A3ViolationError(NumericError):
    """Every accumulation equation degenerates: the rational models vanish identically."""
