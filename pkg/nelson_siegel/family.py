"""The Nelson-Siegel family G(τ, x) = x₁ + (x₂ + x₃τ)e^{-x₄τ} with closed-form derivatives.

Time integrals use I_k(τ) = ∫₀^τ u^k e^{-x₄u} du = k!·P(k+1, x₄τ)/x₄^{k+1}, with P the
regularized lower incomplete gamma function, which stays accurate for small x₄τ.
"""
import math
from dataclasses import dataclass
from typing import final

import numpy as np
from scipy.special import gammainc

from core.domain import DomainBox
from core.errors import DomainError, InvalidInputError
from core.helpers import as_vector, validate_number
from families.interface import ForwardCurveFamily

NS_DIMENSION = 4
NS_DOMAIN = DomainBox(
    np.array([-np.inf, -np.inf, -np.inf, 0.0]),
    np.full(NS_DIMENSION, np.inf),
    open_lower=(False, False, False, True),
)


def ns_state(x):
    """Return x as a validated Nelson-Siegel state (x₄ > 0).

    @throw  DomainError: If x₄ <= 0.
    """
    x = as_vector(x, "x", dimension=NS_DIMENSION)
    if not x[3] > 0.0:
        raise DomainError(f"the decay rate x4 should be > 0, got {x[3]}")
    return x


def _check_tau(tau):
    tau = validate_number(tau, "tau")
    if tau < 0.0:
        raise InvalidInputError(f"tau should be >= 0, got {tau}")
    return tau


def exp_moment(k, rate, tau):
    """Return ∫₀^τ u^k e^{-rate·u} du."""
    if tau == 0.0:
        return 0.0
    if k == 0:
        return -math.expm1(-rate * tau) / rate
    return math.factorial(k) * float(gammainc(k + 1, rate * tau)) / rate ** (k + 1)


def ns_G(x, tau):
    """Return G(τ, x) = x₁ + (x₂ + x₃τ)e^{-x₄τ}.

    @throw  DomainError: If x₄ <= 0.
    """
    x = ns_state(x)
    tau = _check_tau(tau)
    return float(x[0] + (x[1] + x[2] * tau) * math.exp(-x[3] * tau))


@final
@dataclass(frozen=True)
class NSGradients:
    """Closed-form derivatives of G at (τ, x).

    @property dtau:     ∂τG.
    @property gradient: ∇ₓG, shape (4,).
    @property decay_block: ∂ₓ₄∇ₓG, the last column of the Hessian.
    @property hessian:  ∂²ₓG, zero except in the x₄ row and column.
    """

    dtau: float
    gradient: np.ndarray
    decay_block: np.ndarray
    hessian: np.ndarray


def ns_gradients(x, tau):
    """Return the closed-form τ-derivative, gradient and Hessian of G."""
    x = ns_state(x)
    tau = _check_tau(tau)
    x1, x2, x3, x4 = x
    decay = math.exp(-x4 * tau)
    level = x2 + x3 * tau
    gradient = np.array([1.0, decay, tau * decay, -tau * level * decay])
    decay_block = np.array([0.0, -tau * decay, -tau**2 * decay, tau**2 * level * decay])
    hessian = np.zeros((NS_DIMENSION, NS_DIMENSION))
    hessian[3, :] = decay_block
    hessian[:, 3] = decay_block
    return NSGradients(
        dtau=float((x3 - x4 * x2 - x3 * x4 * tau) * decay),
        gradient=gradient,
        decay_block=decay_block,
        hessian=hessian,
    )


def ns_integral(x, tau):
    """Return IG(τ, x) = x₁τ + x₂I₀ + x₃I₁."""
    x = ns_state(x)
    tau = _check_tau(tau)
    return float(x[0] * tau + x[1] * exp_moment(0, x[3], tau) + x[2] * exp_moment(1, x[3], tau))


def ns_integral_gradient(x, tau):
    """Return I∇(τ, x) = (τ, I₀, I₁, -x₂I₁ - x₃I₂)."""
    x = ns_state(x)
    tau = _check_tau(tau)
    moments = [exp_moment(k, x[3], tau) for k in range(3)]
    return np.array([tau, moments[0], moments[1], -x[1] * moments[1] - x[2] * moments[2]])


def ns_integral_hessian(x, tau):
    """Return ∫₀^τ ∂²ₓG du."""
    x = ns_state(x)
    tau = _check_tau(tau)
    moments = [exp_moment(k, x[3], tau) for k in range(4)]
    block = np.array([0.0, -moments[1], -moments[2], x[1] * moments[2] + x[2] * moments[3]])
    hessian = np.zeros((NS_DIMENSION, NS_DIMENSION))
    hessian[3, :] = block
    hessian[:, 3] = block
    return hessian


def ns_log_f(x, xi, tau):
    """Return log f = -∫₀^τ (G(u, x+ξ) - G(u, x)) du.

    @throw  DomainError: If x₄ <= 0 or x₄ + ξ₄ <= 0.
    """
    x = ns_state(x)
    shifted = ns_state(x + as_vector(xi, "xi", dimension=NS_DIMENSION))
    tau = _check_tau(tau)
    if tau == 0.0:
        return 0.0
    return -(ns_integral(shifted, tau) - ns_integral(x, tau))


@final
class NelsonSiegelFamily(ForwardCurveFamily):
    """Nelson-Siegel forward curves on the domain R³ × (0, ∞)."""

    def __init__(self):
        super().__init__(NS_DOMAIN)

    def value(self, tau, x):
        return ns_G(x, tau)

    def dtau(self, tau, x):
        return ns_gradients(x, tau).dtau

    def gradient(self, tau, x):
        return ns_gradients(x, tau).gradient

    def hessian(self, tau, x):
        return ns_gradients(x, tau).hessian

    def integral(self, tau, x):
        return ns_integral(x, tau)

    def integral_gradient(self, tau, x):
        return ns_integral_gradient(x, tau)

    def integral_hessian(self, tau, x):
        return ns_integral_hessian(x, tau)

    def __repr__(self):
        return "NelsonSiegelFamily()"
