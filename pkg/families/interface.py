"""Forward curve family interface definition."""
from abc import ABCMeta, abstractmethod

import numpy as np
from scipy import integrate

from core.errors import InvalidInputError
from core.helpers import validate_number


class ForwardCurveFamily(metaclass=ABCMeta):
    """
    Forward curve family interface definition.

    A family maps a state x in R^n and a time to maturity τ >= 0 to the forward
    rate G(τ, x). Every variant (separable, affine, Nelson-Siegel, numeric)
    implements the evaluators below; the consistency module only talks to this
    interface.
    """

    def __init__(self, domain):
        self.domain = domain

    @property
    def dimension(self):
        return self.domain.dimension

    def check_arguments(self, tau, x, name="x"):
        """Validate (τ, x) and return them as (float, numpy.ndarray).

        @throw  InvalidInputError:  If τ is negative or not finite.
        @throw  DomainError:        If x lies outside the domain box.
        """
        tau = validate_number(tau, "tau")
        if tau < 0.0:
            raise InvalidInputError(f"tau should be >= 0, got {tau}")
        return tau, self.domain.require(x, name)

    @abstractmethod
    def value(self, tau, x):
        """Return G(τ, x)."""

    @abstractmethod
    def dtau(self, tau, x):
        """Return ∂G/∂τ (τ, x)."""

    @abstractmethod
    def gradient(self, tau, x):
        """Return the state gradient ∇ₓG(τ, x), shape (n,)."""

    @abstractmethod
    def hessian(self, tau, x):
        """Return the symmetric state Hessian ∂²ₓG(τ, x), shape (n, n)."""

    @abstractmethod
    def integral(self, tau, x):
        """Return IG(τ, x) = ∫₀^τ G(u, x) du; exactly 0 at τ = 0."""

    @abstractmethod
    def integral_gradient(self, tau, x):
        """Return I∇(τ, x) = ∫₀^τ ∇ₓG(u, x) du, shape (n,); exactly 0 at τ = 0."""

    def integral_hessian(self, tau, x):
        """Return ∫₀^τ ∂²ₓG(u, x) du, shape (n, n).

        The default integrates the Hessian numerically; closed-form variants override it.
        """
        tau, x = self.check_arguments(tau, x)
        if tau == 0.0:
            return np.zeros((self.dimension, self.dimension))
        estimate, _ = integrate.quad_vec(lambda u: self.hessian(u, x), 0.0, tau, epsabs=1e-12)
        return estimate

    def short_rate(self, x):
        """Return the short rate r = G(0, x)."""
        return self.value(0.0, x)

    def bond_price(self, tau, x):
        """Return the zero-coupon bond price exp(-IG(τ, x))."""
        return float(np.exp(-self.integral(tau, x)))

    def values(self, taus, x):
        """Return G on a grid of maturities as an array."""
        return np.array([self.value(tau, x) for tau in np.atleast_1d(taus)])
