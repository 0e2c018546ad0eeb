"""The HJM no-arbitrage drift of a forward rate driven by a Brownian motion and a marked point process."""
import math
from dataclasses import dataclass
from typing import Callable, final

from core.errors import InvalidInputError
from core.helpers import validate_number, validate_positive
from core.measures import JumpMeasure
from core.quadrature import DEFAULT_TOL, integrate_interval


@final
@dataclass(frozen=True)
class HJMInputs:
    """Volatility, jump loading and mark compensator of the forward rate dynamics.

    @property sigma:    Callable (t, T) -> σ(t, T).
    @property rho:      Callable (t, T, y) -> ρ(t, T, y) for a mark y.
    @property marks:    JumpMeasure: the mark distribution.
    @property rate:     Total rate ν of the marked point process (finite, >= 0).
    """

    sigma: Callable
    rho: Callable
    marks: JumpMeasure
    rate: float

    def __post_init__(self):
        validate_positive(self.rate, "rate", strict=False)

    @classmethod
    def constant(cls, sigma, loading, rate, marks):
        """Constant volatility σ₀ and jump loading ρ₀."""
        return cls(lambda t, T: sigma, lambda t, T, y: loading, marks, rate)


def hjm_drift(inputs, t, T, tol=DEFAULT_TOL):
    """Return α(t, T) = σ(t,T)∫_t^T σ(t,s)ds - ν∫ ρ(t,T,y)exp(-∫_t^T ρ(t,u,y)du) Q(dy).

    @throw  InvalidInputError:  If t > T.
    @throw  AccuracyError:      If a quadrature does not converge.
    @retval float
    """
    t = validate_number(t, "t")
    T = validate_number(T, "T")
    if t > T:
        raise InvalidInputError(f"need t <= T, got t={t}, T={T}")
    if t == T:
        return 0.0
    diffusion = inputs.sigma(t, T) * integrate_interval(lambda s: inputs.sigma(t, s), t, T, tol)
    if inputs.rate == 0.0:
        return float(diffusion)

    def jump_integrand(y):
        loading = inputs.rho(t, T, y)
        if loading == 0.0:
            return 0.0
        return loading * math.exp(-integrate_interval(lambda u: inputs.rho(t, u, y), t, T, tol))

    jump = inputs.rate * inputs.marks.expect(jump_integrand, tol)
    return float(diffusion - jump)
