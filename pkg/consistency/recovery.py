"""Recovery of (a, b, λ) from a curve family by least squares on the consistency condition."""
import logging
from dataclasses import dataclass
from typing import final

import numpy as np

from consistency.residual import jump_integral
from core.errors import InvalidInputError
from core.helpers import as_grid
from core.measures import DEFAULT_TOL

logger = logging.getLogger(__name__)

RANK_DEFICIENT_CONDITION = 1e10


@final
@dataclass(frozen=True)
class RecoveredCoefficients:
    """Coefficients that make a family consistent at one state x.

    @property a:                Symmetric diffusion matrix estimate.
    @property b:                Drift estimate.
    @property intensity:        Jump intensity estimate; may be negative (not projected).
    @property residual_norm:    Euclidean norm of the least-squares residual.
    @property condition_number: 2-norm condition number of the design matrix.
    """

    a: np.ndarray
    b: np.ndarray
    intensity: float
    residual_norm: float
    condition_number: float

    @property
    def rank_deficient(self):
        return not self.condition_number < RANK_DEFICIENT_CONDITION

    @property
    def negative_intensity(self):
        return self.intensity < 0.0

    def to_dict(self):
        return {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "intensity": self.intensity,
            "residual_norm": self.residual_norm,
            "condition_number": self.condition_number,
            "rank_deficient": self.rank_deficient,
            "negative_intensity": self.negative_intensity,
        }


def unknown_count(dimension):
    """Number of unknowns: n drift entries, n(n+1)/2 diffusion entries and λ."""
    return dimension + dimension * (dimension + 1) // 2 + 1


def design_row(family, jumps, x, tau, tol=DEFAULT_TOL):
    """Return (row, target) of the regression of ∂τG on the consistency basis at τ."""
    n = family.dimension
    gradient = family.gradient(tau, x)
    hessian = family.hessian(tau, x)
    integral_gradient = family.integral_gradient(tau, x)
    row = list(gradient)
    for i in range(n):
        for j in range(i, n):
            column = hessian[i, j] - 2.0 * gradient[i] * integral_gradient[j]
            if i != j:
                column += hessian[j, i] - 2.0 * gradient[j] * integral_gradient[i]
            row.append(column)
    row.append(jump_integral(family, jumps, x, tau, tol))
    return np.array(row), family.dtau(tau, x)


def recover_coefficients(family, jumps, x, tau_samples, tol=DEFAULT_TOL):
    """Solve the consistency condition at x for (a, b, λ) in the least-squares sense.

    @param  family:         ForwardCurveFamily.
    @param  jumps:          JumpMeasure Q.
    @param  x:              State inside the family's domain.
    @param  tau_samples:    Maturities; at least n + n(n+1)/2 + 1 of them.
    @param  tol:            Jump quadrature tolerance.
    @throw  InvalidInputError: If the system is under-determined.
    @retval RecoveredCoefficients: rank deficiency is flagged, not raised.
    """
    n = family.dimension
    taus = as_grid(tau_samples, "tau_samples")
    if taus.size < unknown_count(n):
        raise InvalidInputError(
            f"need at least {unknown_count(n)} maturities to recover (a, b, λ) in "
            f"dimension {n}, got {taus.size}"
        )
    x = family.domain.require(x)
    rows, targets = zip(*(design_row(family, jumps, x, tau, tol) for tau in taus))
    design = np.vstack(rows)
    target = np.array(targets)
    solution, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
    singular = np.linalg.svd(design, compute_uv=False)
    condition = float(singular[0] / singular[-1]) if singular[-1] > 0.0 else np.inf

    a = np.zeros((n, n))
    position = n
    for i in range(n):
        for j in range(i, n):
            a[i, j] = a[j, i] = solution[position]
            position += 1
    recovered = RecoveredCoefficients(
        a=a,
        b=solution[:n].copy(),
        intensity=float(solution[-1]),
        residual_norm=float(np.linalg.norm(design @ solution - target)),
        condition_number=condition,
    )
    if recovered.rank_deficient:
        logger.warning(
            "recovery at x=%s is rank deficient (condition number %.3e)", x.tolist(), condition
        )
    if recovered.negative_intensity:
        logger.warning("recovered a negative jump intensity %.3e", recovered.intensity)
    return recovered
