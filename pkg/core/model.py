"""The jump-diffusion state model dX = b(X)dt + c(X)dW + jumps of intensity λ(X) and law Q."""
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, final

import numpy as np

from core.coefficients import AffineCoefficient, CoefficientFunction
from core.domain import DomainBox
from core.errors import InvalidInputError
from core.helpers import as_matrix, symmetrize
from core.measures import JumpMeasure

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-10
DEFAULT_PROBE_COUNT = 100


def make_diffusion_matrix(c_value):
    """Return a = ½ c cᵀ.

    @param  c_value:    Square matrix c(x) (or a stack of them of shape (k, n, n)).
    @throw  InvalidInputError: If c_value contains non-finite entries.
    @retval numpy.ndarray
    """
    c_value = np.asarray(c_value, dtype=float)
    if c_value.ndim == 2:
        c_value = as_matrix(c_value, "c", shape=(c_value.shape[0], c_value.shape[0]))
    elif not np.isfinite(c_value).all():
        raise InvalidInputError("c contains non-finite entries")
    return symmetrize(0.5 * c_value @ np.swapaxes(c_value, -1, -2))


def diffusion_root(a_value):
    """Return the symmetric square root c = √(2a) of a PSD matrix (or stack)."""
    eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(np.asarray(a_value, dtype=float)))
    root = np.sqrt(np.clip(2.0 * eigenvalues, 0.0, None))
    return (eigenvectors * root[..., np.newaxis, :]) @ np.swapaxes(eigenvectors, -1, -2)


@final
@dataclass(frozen=True)
class JumpDiffusionModel:
    """Coefficients (b, c, a, λ) and jump law Q of the state SDE.

    Either the volatility c or the diffusion matrix a (or both) must be given.
    Giving a directly keeps square-root factors affine in the state.

    @property domain:           DomainBox of admissible states.
    @property drift:            CoefficientFunction R^n -> R^n.
    @property intensity:        CoefficientFunction R^n -> R (values >= 0).
    @property jumps:            JumpMeasure Q on R^n.
    @property diffusion:        (optional) CoefficientFunction R^n -> R^{n x n}, c(x).
    @property diffusion_matrix: (optional) CoefficientFunction R^n -> R^{n x n}, a(x).
    """

    domain: DomainBox
    drift: CoefficientFunction
    intensity: CoefficientFunction
    jumps: JumpMeasure
    diffusion: Optional[CoefficientFunction] = None
    diffusion_matrix: Optional[CoefficientFunction] = None
    name: str = field(default="model", compare=False)

    def __post_init__(self):
        n = self.domain.dimension
        if not isinstance(self.jumps, JumpMeasure):
            raise InvalidInputError(
                "jumps should be a JumpMeasure; state-dependent jump laws are not supported"
            )
        if self.diffusion is None and self.diffusion_matrix is None:
            raise InvalidInputError("either diffusion (c) or diffusion_matrix (a) is required")
        expected = {
            "drift": (self.drift, (n,)),
            "intensity": (self.intensity, ()),
            "diffusion": (self.diffusion, (n, n)),
            "diffusion_matrix": (self.diffusion_matrix, (n, n)),
        }
        for label, (function, shape) in expected.items():
            if function is None:
                continue
            if not isinstance(function, CoefficientFunction):
                raise InvalidInputError(f"{label} should be a CoefficientFunction")
            if function.input_dim != n or function.output_shape != shape:
                raise InvalidInputError(
                    f"{label} maps R^{function.input_dim} -> {function.output_shape}, "
                    f"expected R^{n} -> {shape}"
                )
        if self.jumps.dimension != n:
            raise InvalidInputError(
                f"jump measure has dimension {self.jumps.dimension}, model has {n}"
            )

    @property
    def dimension(self):
        return self.domain.dimension

    def b(self, x):
        return self.drift(x)

    def intensity_at(self, x):
        return self.intensity(x)

    def a(self, x):
        """Return the diffusion matrix a(x) (batched on (k, n) input)."""
        if self.diffusion_matrix is not None:
            return symmetrize(self.diffusion_matrix(x))
        return make_diffusion_matrix(self.diffusion(x))

    def c(self, x):
        """Return the volatility c(x), the square root of 2a(x) when only a is given."""
        if self.diffusion is not None:
            return self.diffusion(x)
        return diffusion_root(self.a(x))

    @property
    def has_jumps(self):
        """False when the jump part is inert everywhere (Q is the point mass at 0)."""
        return not self.jumps.is_dirac_zero

    @property
    def is_affine(self):
        try:
            self.affine_coefficients()
        except InvalidInputError:
            return False
        return True

    def affine_coefficients(self):
        """Return the affine (drift, a, λ) triple of an affine model.

        @throw  InvalidInputError: Naming the first coefficient that is not affine.
        @retval tuple of AffineCoefficient
        """
        if not self.drift.is_affine:
            raise InvalidInputError("drift b is not an affine coefficient")
        if not self.intensity.is_affine:
            raise InvalidInputError("intensity λ is not an affine coefficient")
        if self.diffusion_matrix is not None:
            if not self.diffusion_matrix.is_affine:
                raise InvalidInputError("diffusion matrix a is not an affine coefficient")
            a_coefficient = self.diffusion_matrix
        elif self.diffusion.is_affine and not self.diffusion.linear.any():
            a_coefficient = AffineCoefficient.constant_value(
                make_diffusion_matrix(self.diffusion.constant), self.dimension
            )
        else:
            raise InvalidInputError(
                "diffusion c is state dependent; give the diffusion matrix a explicitly"
            )
        return self.drift, a_coefficient, self.intensity

    def with_drift(self, drift):
        return replace(self, drift=drift)

    def with_intensity(self, intensity):
        return replace(self, intensity=intensity)

    def with_jumps(self, jumps):
        return replace(self, jumps=jumps)

    def validate(self, points=DEFAULT_PROBE_COUNT, seed=0):
        """Check the model at quasi-random points of the domain box.

        @param  points: Number of probe points.
        @param  seed:   Seed of the scrambled Halton sequence.
        @throw  InvalidInputError: If a(x) has an eigenvalue below -1e-10, λ(x) < 0,
                                   a coefficient is not finite, or ½ccᵀ differs from
                                   an explicitly given a.
        @retval JumpDiffusionModel: self, so calls can be chained.
        """
        probes = self.domain.probe_points(points, seed=seed)
        drift = self.drift(probes)
        intensity = self.intensity(probes)
        a_values = self.a(probes)
        for label, values in (("drift", drift), ("intensity", intensity), ("a", a_values)):
            if not np.isfinite(values).all():
                raise InvalidInputError(f"{label} is not finite at some probe point")
        if (intensity < 0.0).any():
            worst = probes[int(np.argmin(intensity))]
            raise InvalidInputError(f"intensity λ is negative at x={worst.tolist()}")
        smallest = np.linalg.eigvalsh(a_values).min(axis=1)
        if (smallest < -PSD_TOLERANCE).any():
            worst = probes[int(np.argmin(smallest))]
            raise InvalidInputError(
                f"diffusion matrix is not positive semi-definite at x={worst.tolist()} "
                f"(eigenvalue {smallest.min():.3e})"
            )
        if self.diffusion is not None and self.diffusion_matrix is not None:
            mismatch = np.abs(make_diffusion_matrix(self.diffusion(probes)) - a_values).max()
            if mismatch > 1e-10 * max(1.0, np.abs(a_values).max()):
                raise InvalidInputError(f"½ccᵀ differs from the given a by {mismatch:.3e}")
        logger.debug("model %s validated at %d probe points", self.name, points)
        return self
