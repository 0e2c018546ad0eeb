"""Forward curve family given only by an evaluable G; everything else is numerical."""
import logging
from typing import final

import numpy as np
from scipy import integrate

from core.errors import AccuracyError, InvalidInputError
from families.interface import ForwardCurveFamily

logger = logging.getLogger(__name__)

DERIVATIVE_STEP = 1e-5
# second differences lose two orders of magnitude to rounding, so they use a wider step
HESSIAN_STEP = 1e-4
QUADRATURE_TOL = 1e-12


@final
class NumericCallableFamily(ForwardCurveFamily):
    """Family built from a callable G(τ, x).

    Derivatives are central differences with step h = 1e-5·max(1, |x_i|)
    (noise floor about 1e-7); the Hessian uses 1e-4·max(1, |x_i|). The
    antiderivatives IG and I∇ are computed by adaptive quadrature.

    @param func:    Callable (τ, x) -> float.
    @param domain:  DomainBox of admissible states.
    @param name:    (optional) Label used in reports.
    """

    def __init__(self, func, domain, name=None):
        super().__init__(domain)
        if not callable(func):
            raise InvalidInputError("func should be callable")
        self.func = func
        self.name = name or getattr(func, "__name__", "numeric")

    def _steps(self, x, scale):
        return scale * np.maximum(1.0, np.abs(x))

    def value(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return float(self.func(tau, x))

    def dtau(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        step = DERIVATIVE_STEP * max(1.0, tau)
        if tau < step:
            # one-sided second-order stencil at the τ = 0 boundary
            return (
                -3.0 * self.func(tau, x) + 4.0 * self.func(tau + step, x) - self.func(tau + 2.0 * step, x)
            ) / (2.0 * step)
        return (self.func(tau + step, x) - self.func(tau - step, x)) / (2.0 * step)

    def _gradient(self, tau, x):
        steps = self._steps(x, DERIVATIVE_STEP)
        gradient = np.empty(self.dimension)
        for i, step in enumerate(steps):
            shift = np.zeros(self.dimension)
            shift[i] = step
            gradient[i] = (self.func(tau, x + shift) - self.func(tau, x - shift)) / (2.0 * step)
        return gradient

    def gradient(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return self._gradient(tau, x)

    def _hessian(self, tau, x):
        n = self.dimension
        steps = self._steps(x, HESSIAN_STEP)
        centre = self.func(tau, x)
        hessian = np.empty((n, n))
        for i in range(n):
            e_i = np.zeros(n)
            e_i[i] = steps[i]
            hessian[i, i] = (
                self.func(tau, x + e_i) - 2.0 * centre + self.func(tau, x - e_i)
            ) / steps[i] ** 2
            for j in range(i + 1, n):
                e_j = np.zeros(n)
                e_j[j] = steps[j]
                mixed = (
                    self.func(tau, x + e_i + e_j)
                    - self.func(tau, x + e_i - e_j)
                    - self.func(tau, x - e_i + e_j)
                    + self.func(tau, x - e_i - e_j)
                ) / (4.0 * steps[i] * steps[j])
                hessian[i, j] = hessian[j, i] = mixed
        return hessian

    def hessian(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return self._hessian(tau, x)

    def integral(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        if tau == 0.0:
            return 0.0
        estimate, error = integrate.quad(
            lambda u: self.func(u, x), 0.0, tau, epsabs=QUADRATURE_TOL, limit=200
        )
        if not np.isfinite(estimate):
            raise AccuracyError(f"IG({tau}) is not finite", estimate=estimate, error_bound=error)
        return float(estimate)

    def integral_gradient(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        if tau == 0.0:
            return np.zeros(self.dimension)
        estimate, error = integrate.quad_vec(
            lambda u: self._gradient(u, x), 0.0, tau, epsabs=QUADRATURE_TOL
        )
        logger.debug("I∇ quadrature for %s at τ=%g: error bound %.2e", self.name, tau, error)
        return estimate

    def integral_hessian(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        if tau == 0.0:
            return np.zeros((self.dimension, self.dimension))
        estimate, _ = integrate.quad_vec(
            lambda u: self._hessian(u, x), 0.0, tau, epsabs=QUADRATURE_TOL
        )
        return estimate
