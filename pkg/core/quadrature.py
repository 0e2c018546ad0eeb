"""Adaptive quadrature with explicit accuracy and divergence reporting."""
import math
import warnings

import numpy as np
from scipy import integrate

from core.errors import AccuracyError, DivergentIntegralError

DEFAULT_TOL = 1e-10
QUADRATURE_LIMIT = 200


def _checked(estimate, error, caught, tol):
    messages = [
        str(w.message) for w in caught if issubclass(w.category, integrate.IntegrationWarning)
    ]
    if not math.isfinite(estimate):
        raise DivergentIntegralError(f"integral is not finite ({estimate})")
    if any("divergent" in message for message in messages):
        raise DivergentIntegralError(
            f"integral is probably divergent: estimate {estimate}, error bound {error}"
        )
    if messages or error > max(tol, 1e-12 * abs(estimate)) * 10.0:
        raise AccuracyError(
            f"quadrature did not reach tol={tol}: estimate {estimate}, "
            f"error bound {error} ({'; '.join(messages) or 'error bound too large'})",
            estimate=estimate,
            error_bound=error,
        )
    return float(estimate)


def integrate_interval(func, lower, upper, tol=DEFAULT_TOL):
    """Integrate a scalar function over [lower, upper] with scipy's adaptive quad.

    @throw  DivergentIntegralError: If the integrator reports divergence or the
                                    estimate is not finite.
    @throw  AccuracyError:          If the tolerance could not be reached.
    @retval float
    """
    if lower == upper:
        return 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            estimate, error = integrate.quad(
                func, lower, upper, epsabs=tol, epsrel=1e-12, limit=QUADRATURE_LIMIT
            )
    return _checked(estimate, error, caught, tol)


def integrate_unit_cube(func, dimension, tol=DEFAULT_TOL):
    """Integrate func over the unit cube [0, 1]^dimension with adaptive quadrature.

    @param  func:       Callable of `dimension` scalar arguments.
    @param  dimension:  Number of integration variables (>= 1).
    @param  tol:        Absolute tolerance.
    @retval float
    """
    if dimension == 1:
        return integrate_interval(func, 0.0, 1.0, tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            estimate, error = integrate.nquad(
                func,
                [[0.0, 1.0]] * dimension,
                opts={"epsabs": tol, "epsrel": 1e-12, "limit": QUADRATURE_LIMIT},
            )
    return _checked(estimate, error, caught, tol)
