"""Exception hierarchy shared by every package of the toolkit.

Each class also derives from the closest builtin exception, so callers that
only catch ValueError or ArithmeticError keep working.
"""


class TermStructureError(Exception):
    """Base class of all errors raised by the toolkit."""


class InvalidInputError(TermStructureError, ValueError):
    """Raised when an input is malformed, non-finite or of the wrong shape."""


class DomainError(TermStructureError, ValueError):
    """Raised when a state lies outside the domain box of a model or family."""


class DivergentIntegralError(TermStructureError, ArithmeticError):
    """Raised when a Laplace transform or expectation does not converge.

    @property coordinate:   Index of the offending coordinate, or None if unknown.
    """

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class AccuracyError(TermStructureError, ArithmeticError):
    """Raised when adaptive quadrature stops before reaching the tolerance.

    @property estimate:     Best estimate of the integral.
    @property error_bound:  Error bound reported by the integrator.
    """

    def __init__(self, message, estimate=float("nan"), error_bound=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class RegularityError(TermStructureError, ArithmeticError):
    """Raised when the jump regularity condition (finite jump integral of the curve increment) fails."""


class AnchorSelectionError(TermStructureError, ValueError):
    """Raised when the basis matrix at the chosen anchor points is ill-conditioned."""


class ExplosionError(TermStructureError, ArithmeticError):
    """Raised when a Riccati solution blows up.

    @property tau:  Maturity reached before the blow-up was detected.
    """

    def __init__(self, message, tau):
        super().__init__(message)
        self.tau = tau


class RangeError(TermStructureError, ValueError):
    """Raised when a path is evaluated beyond its maturity range."""


class StepSizeError(TermStructureError, ValueError):
    """Raised when the jump probability per simulation step exceeds one."""
