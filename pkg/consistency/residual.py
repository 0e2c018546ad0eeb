"""Pointwise consistency residual of a (model, curve family) pair.

At a state x and maturity τ the residual is

    -∂τG + Σ bᵢ∂ᵢG + Σ aᵢⱼ∂ᵢⱼG - 2 Σ aᵢⱼ∂ᵢG·I∇ⱼ + λ(x)∫δ₀(x, τ, ξ)Q(dξ)

and vanishes for every (τ, x) exactly when the model is consistent with the family.
"""
import logging
import math
from dataclasses import dataclass
from typing import final

import numpy as np

from core.errors import AccuracyError, DivergentIntegralError, RegularityError
from core.measures import DEFAULT_TOL, expect

logger = logging.getLogger(__name__)

TERM_NAMES = ("drift", "diff", "cross", "jump", "dtau")


@final
@dataclass(frozen=True)
class ResidualTerms:
    """Per-term breakdown of the consistency residual at one (τ, x) node."""

    drift: float
    diff: float
    cross: float
    jump: float
    dtau: float

    @property
    def residual(self):
        return math.fsum((self.drift, self.diff, self.cross, self.jump, self.dtau))

    def as_tuple(self):
        return (self.drift, self.diff, self.cross, self.jump, self.dtau)

    def __float__(self):
        return self.residual


def delta0(family, x, tau, xi):
    """Return δ₀(x, τ, ξ) = [G(τ, x+ξ) - G(τ, x)]·exp(-(IG(τ, x+ξ) - IG(τ, x))).

    @param  family: ForwardCurveFamily.
    @param  x:      State inside the domain box.
    @param  tau:    Maturity τ >= 0.
    @param  xi:     Jump size; x + ξ must stay in the domain box.
    @throw  DomainError: If x or x + ξ lies outside the domain box.
    @retval float
    """
    x = np.asarray(x, dtype=float)
    shifted = x + np.asarray(xi, dtype=float)
    family.check_arguments(tau, shifted, name="x + xi")
    increment = family.value(tau, shifted) - family.value(tau, x)
    if increment == 0.0:
        return 0.0
    return increment * math.exp(-(family.integral(tau, shifted) - family.integral(tau, x)))


def jumps_stay_in_domain(family, jumps, x):
    """Return True if every translate x + ξ, ξ in the support of Q, lies in the domain."""
    lower, upper = jumps.support_bounds()
    return family.domain.contains_translates(np.asarray(x, dtype=float), lower, upper)


def jump_integral(family, jumps, x, tau, tol=DEFAULT_TOL):
    """Return ∫ δ₀(x, τ, ξ) Q(dξ) within tol.

    @throw  RegularityError: If the jumps can leave the domain, or the integral
                             diverges or fails to converge (jump regularity condition).
    @retval float
    """
    tau, x = family.check_arguments(tau, x)
    if jumps.is_dirac_zero:
        return 0.0
    if not jumps_stay_in_domain(family, jumps, x):
        raise RegularityError(
            f"jump regularity condition violated: x={x.tolist()} plus a jump in the "
            "support of Q leaves the domain of the curve family"
        )
    try:
        return expect(jumps, lambda xi: delta0(family, x, tau, xi), tol)
    except (DivergentIntegralError, AccuracyError, OverflowError) as e:
        raise RegularityError(
            f"jump regularity condition violated at tau={tau}, x={x.tolist()}: {e}"
        ) from e


def _jump_term(model, family, x, tau, tol):
    intensity = float(model.intensity(x))
    if intensity == 0.0 or not model.has_jumps:
        return 0.0
    return intensity * jump_integral(family, model.jumps, x, tau, tol)


def consistency_residual(model, family, x, tau, tol=DEFAULT_TOL):
    """Evaluate the consistency residual at (τ, x) with its term breakdown.

    @param  model:  JumpDiffusionModel.
    @param  family: ForwardCurveFamily of the same dimension.
    @param  x:      State inside the domain box.
    @param  tau:    Maturity τ >= 0.
    @param  tol:    Tolerance of the jump quadrature.
    @throw  DomainError:        If x lies outside the domain.
    @throw  RegularityError:    If the jump integral is not finite.
    @retval ResidualTerms
    """
    tau, x = family.check_arguments(tau, x)
    gradient = family.gradient(tau, x)
    a_value = model.a(x)
    return ResidualTerms(
        drift=float(gradient @ model.b(x)),
        diff=float(np.sum(a_value * family.hessian(tau, x))),
        cross=float(-2.0 * gradient @ a_value @ family.integral_gradient(tau, x)),
        jump=_jump_term(model, family, x, tau, tol),
        dtau=float(-family.dtau(tau, x)),
    )


def integrated_residual(model, family, x, tau, tol=DEFAULT_TOL):
    """Evaluate the τ-integrated (bond price) form of the consistency condition.

    Returns G(τ,x) - G(0,x) - [b·I∇ + Σ aᵢⱼ(∫∂ᵢⱼG - I∇ᵢI∇ⱼ) + λ∫(1 - e^{-ΔIG})dQ],
    whose τ-derivative is minus the pointwise residual (consistency_residual has
    the model terms positive and -∂τG last).
    """
    tau, x = family.check_arguments(tau, x)
    integral_gradient = family.integral_gradient(tau, x)
    a_value = model.a(x)
    rhs = float(model.b(x) @ integral_gradient)
    rhs += float(np.sum(a_value * family.integral_hessian(tau, x)))
    rhs -= float(integral_gradient @ a_value @ integral_gradient)
    intensity = float(model.intensity(x))
    if intensity != 0.0 and model.has_jumps:
        if not jumps_stay_in_domain(family, model.jumps, x):
            raise RegularityError(f"jumps from x={x.tolist()} leave the domain of the curve family")
        base = family.integral(tau, x)
        try:
            rhs += intensity * expect(
                model.jumps,
                lambda xi: -math.expm1(-(family.integral(tau, x + xi) - base)),
                tol,
            )
        except (DivergentIntegralError, AccuracyError, OverflowError) as e:
            raise RegularityError(f"jump integral diverges at tau={tau}: {e}") from e
    return family.value(tau, x) - family.value(0.0, x) - rhs
