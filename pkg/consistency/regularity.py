"""Numerical check of the jump regularity condition ∫ |δ₀(x, τ, ξ)| Q(dξ) < ∞."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, final

import numpy as np

from consistency.residual import delta0, jumps_stay_in_domain
from core.errors import AccuracyError, DivergentIntegralError, DomainError, InvalidInputError
from core.measures import DEFAULT_TOL, expect

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 8


@final
@dataclass(frozen=True)
class RegularityResult:
    """Outcome of a regularity scan.

    @property regular:      True if the integral converged at every scanned τ.
    @property bound:        Largest integral found (inf when the check failed).
    @property failing_tau:  First maturity where the check failed, or None.
    @property reason:       Error message of the failure, empty when regular.
    """

    regular: bool
    bound: float
    failing_tau: Optional[float] = None
    reason: str = ""

    def __bool__(self):
        return self.regular


def regularity_check(family, jumps, x, tau_max, tol=DEFAULT_TOL, grid_size=DEFAULT_GRID_SIZE):
    """Check regularity on a log-spaced maturity grid ending at tau_max.

    @throw  InvalidInputError: If tau_max is not positive.
    @retval RegularityResult
    """
    if not tau_max > 0.0:
        raise InvalidInputError(f"tau_max should be > 0, got {tau_max}")
    if jumps.is_dirac_zero:
        return RegularityResult(True, 0.0)
    x = np.asarray(x, dtype=float)
    if not jumps_stay_in_domain(family, jumps, x):
        return RegularityResult(
            False, math.inf, None, "the support of Q moves the state out of the domain"
        )
    taus = np.geomspace(min(1e-2, tau_max), tau_max, grid_size)
    bound = 0.0
    for tau in taus:
        try:
            value = expect(jumps, lambda xi, t=tau: abs(delta0(family, x, t, xi)), tol)
        except (DivergentIntegralError, AccuracyError, DomainError, OverflowError) as e:
            logger.info("regularity fails at tau=%g: %s", tau, e)
            return RegularityResult(False, math.inf, float(tau), str(e))
        if not math.isfinite(value):
            return RegularityResult(False, math.inf, float(tau), "integral is not finite")
        bound = max(bound, value)
    return RegularityResult(True, bound)
