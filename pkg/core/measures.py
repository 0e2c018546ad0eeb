"""Jump-size measures Q and their primitives: Laplace transform, expectation and sampling.

Every measure is a probability measure on R^n. Parametric variants are product
measures; their expectations are computed by adaptive quadrature on the unit
cube after mapping each active coordinate through its quantile function.
"""
import math
from abc import ABCMeta, abstractmethod
from typing import final

import numpy as np
from scipy.special import log_ndtr, ndtri
from scipy.stats import norm, truncnorm

from core.errors import DivergentIntegralError, InvalidInputError
from core.helpers import as_matrix, as_vector
from core.quadrature import DEFAULT_TOL, integrate_unit_cube


class JumpMeasure(metaclass=ABCMeta):
    """Probability measure Q of the jump sizes on R^n."""

    def __init__(self, dimension):
        self.dimension = int(dimension)
        if self.dimension <= 0:
            raise InvalidInputError("jump measure dimension should be positive")

    @property
    def is_dirac_zero(self):
        """True if Q is the Dirac measure at the origin (no jumps ever move the state)."""
        return False

    def _check_argument(self, v):
        return as_vector(v, "v", dimension=self.dimension)

    @abstractmethod
    def laplace(self, v):
        """Return the Laplace transform Ψ(v) = ∫ exp(-<v, ξ>) Q(dξ).

        @throw  DivergentIntegralError: If the integral diverges at v; the
                                        offending coordinate is reported.
        """

    @abstractmethod
    def laplace_gradient(self, v):
        """Return the gradient of the Laplace transform at v."""

    @abstractmethod
    def expect(self, f, tol=DEFAULT_TOL):
        """Return ∫ f(ξ) Q(dξ) for a callable f taking a state of shape (n,).

        @param  f:      Callable R^n -> R, finite Q-almost everywhere.
        @param  tol:    Absolute tolerance (> 0) for quadrature-based variants.
        @throw  AccuracyError:          Quadrature failed to converge.
        @throw  DivergentIntegralError: The integral diverges.
        """

    def expect_coordinate(self, coordinate, g, tol=DEFAULT_TOL):
        """Return ∫ g(ξ_i) Q(dξ) for one coordinate i (the marginal expectation)."""
        return self.expect(lambda xi: g(xi[coordinate]), tol)

    @abstractmethod
    def sample(self, rng, size=None):
        """Draw i.i.d. jump sizes.

        @param  rng:    numpy.random.Generator.
        @param  size:   None for a single draw of shape (n,), otherwise an int k
                        for an array of shape (k, n).
        """

    @abstractmethod
    def support_bounds(self):
        """Return per-coordinate (lower, upper) bounds of the support hull."""

    @abstractmethod
    def to_dict(self):
        """Return a configuration dictionary understood by the model factory."""


@final
class DiracZero(JumpMeasure):
    """Point mass at the origin: jumps leave the state unchanged."""

    @property
    def is_dirac_zero(self):
        return True

    def laplace(self, v):
        self._check_argument(v)
        return 1.0

    def laplace_gradient(self, v):
        self._check_argument(v)
        return np.zeros(self.dimension)

    def expect(self, f, tol=DEFAULT_TOL):
        return float(f(np.zeros(self.dimension)))

    def sample(self, rng, size=None):
        return np.zeros(self.dimension) if size is None else np.zeros((int(size), self.dimension))

    def support_bounds(self):
        return np.zeros(self.dimension), np.zeros(self.dimension)

    def to_dict(self):
        return {"type": "dirac_zero", "dimension": self.dimension}

    def __repr__(self):
        return f"DiracZero(dimension={self.dimension})"


class _AtomicMeasure(JumpMeasure):
    """Finitely supported measure sum_j w_j δ_{ξ_j}; expectations are exact sums."""

    def __init__(self, points, weights):
        super().__init__(points.shape[1])
        self.points = points
        self.weights = weights
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    def laplace(self, v):
        v = self._check_argument(v)
        return float(np.dot(self.weights, np.exp(-self.points @ v)))

    def laplace_gradient(self, v):
        v = self._check_argument(v)
        kernel = self.weights * np.exp(-self.points @ v)
        return -(kernel @ self.points)

    def expect(self, f, tol=DEFAULT_TOL):
        values = [float(f(point)) for point in self.points]
        return math.fsum(w * value for w, value in zip(self.weights, values))

    def support_bounds(self):
        return self.points.min(axis=0), self.points.max(axis=0)


@final
class Discrete(_AtomicMeasure):
    """Finitely many atoms ξ_j with weights w_j in (0, 1] summing to one."""

    def __init__(self, points, weights):
        points = as_matrix(np.atleast_2d(np.asarray(points, dtype=float)), "points")
        weights = as_vector(weights, "weights", dimension=points.shape[0])
        if (weights <= 0.0).any() or (weights > 1.0).any():
            raise InvalidInputError("atom weights should lie in (0, 1]")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise InvalidInputError(f"atom weights should sum to 1, got {math.fsum(weights)}")
        super().__init__(points, weights)

    def sample(self, rng, size=None):
        index = rng.choice(self.weights.size, size=size, p=self.weights)
        return self.points[index].copy()

    def to_dict(self):
        return {
            "type": "discrete",
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }

    def __repr__(self):
        return f"Discrete(points={self.points.tolist()}, weights={self.weights.tolist()})"


@final
class Empirical(_AtomicMeasure):
    """Empirical measure of a sample; expectations are sample means."""

    def __init__(self, samples):
        samples = as_matrix(np.atleast_2d(np.asarray(samples, dtype=float)), "samples")
        if samples.shape[0] == 0:
            raise InvalidInputError("an empirical measure needs at least one sample")
        super().__init__(samples, np.full(samples.shape[0], 1.0 / samples.shape[0]))

    def expect(self, f, tol=DEFAULT_TOL):
        return math.fsum(float(f(point)) for point in self.points) / self.points.shape[0]

    def sample(self, rng, size=None):
        index = rng.integers(self.points.shape[0], size=size)
        return self.points[index].copy()

    def to_dict(self):
        return {"type": "empirical", "samples": self.points.tolist()}

    def __repr__(self):
        return f"Empirical(count={self.points.shape[0]}, dimension={self.dimension})"


class _ProductMeasure(JumpMeasure):
    """Product of independent one-dimensional laws, some of which may be degenerate."""

    @property
    @abstractmethod
    def active_coordinates(self):
        """Indices of the non-degenerate coordinates."""

    @abstractmethod
    def _degenerate_point(self):
        """Values of the degenerate coordinates (active entries are ignored)."""

    @abstractmethod
    def _quantile(self, coordinate, u):
        """Map u in (0, 1) to the u-quantile of the given active coordinate."""

    def expect(self, f, tol=DEFAULT_TOL):
        active = self.active_coordinates
        base = self._degenerate_point()
        if not active:
            return float(f(base))

        def integrand(*unit):
            xi = base.copy()
            for position, coordinate in enumerate(active):
                xi[coordinate] = self._quantile(coordinate, unit[position])
            return float(f(xi))

        return integrate_unit_cube(integrand, len(active), tol)

    def expect_coordinate(self, coordinate, g, tol=DEFAULT_TOL):
        if coordinate not in self.active_coordinates:
            return float(g(self._degenerate_point()[coordinate]))
        return integrate_unit_cube(lambda u: float(g(self._quantile(coordinate, u))), 1, tol)


@final
class ExponentialProduct(_ProductMeasure):
    """Independent exponential coordinates ξ_i = s_i E_i with E_i ~ Exp(θ_i).

    @param rates:   Rates θ_i > 0; math.inf marks a coordinate that never jumps.
    @param signs:   (optional) +1 (support R_+) or -1 (support R_-) per coordinate.
    """

    def __init__(self, rates, signs=None):
        rates = as_vector(rates, "rates", allow_infinite=True)
        if (rates <= 0.0).any():
            raise InvalidInputError(f"exponential rates should be > 0, got {rates}")
        signs = np.ones(rates.size) if signs is None else as_vector(signs, "signs", rates.size)
        if not np.isin(signs, (-1.0, 1.0)).all():
            raise InvalidInputError("signs should be +1 or -1")
        super().__init__(rates.size)
        self.rates = rates
        self.signs = signs

    @property
    def active_coordinates(self):
        return [i for i in range(self.dimension) if np.isfinite(self.rates[i])]

    def _degenerate_point(self):
        return np.zeros(self.dimension)

    def _quantile(self, coordinate, u):
        return self.signs[coordinate] * (-math.log1p(-u) / self.rates[coordinate])

    def _denominators(self, v):
        denominators = {}
        for i in self.active_coordinates:
            denominator = self.rates[i] + self.signs[i] * v[i]
            if denominator <= 0.0:
                raise DivergentIntegralError(
                    f"Laplace transform diverges in coordinate {i}: need "
                    f"{'v' if self.signs[i] > 0 else '-v'}[{i}] > {-self.rates[i]}, got v[{i}]={v[i]}",
                    coordinate=i,
                )
            denominators[i] = denominator
        return denominators

    def laplace(self, v):
        v = self._check_argument(v)
        denominators = self._denominators(v)
        return float(np.prod([self.rates[i] / d for i, d in denominators.items()]))

    def laplace_gradient(self, v):
        v = self._check_argument(v)
        value = self.laplace(v)
        gradient = np.zeros(self.dimension)
        for i, denominator in self._denominators(v).items():
            gradient[i] = -self.signs[i] / denominator * value
        return gradient

    def sample(self, rng, size=None):
        count = 1 if size is None else int(size)
        draws = np.zeros((count, self.dimension))
        for i in self.active_coordinates:
            draws[:, i] = self.signs[i] * rng.exponential(1.0 / self.rates[i], size=count)
        return draws[0] if size is None else draws

    def support_bounds(self):
        lower = np.zeros(self.dimension)
        upper = np.zeros(self.dimension)
        for i in self.active_coordinates:
            if self.signs[i] > 0:
                upper[i] = np.inf
            else:
                lower[i] = -np.inf
        return lower, upper

    def to_dict(self):
        return {
            "type": "exponential",
            "rates": [float(r) if np.isfinite(r) else None for r in self.rates],
            "signs": self.signs.tolist(),
        }

    def __repr__(self):
        return f"ExponentialProduct(rates={self.rates.tolist()}, signs={self.signs.tolist()})"


@final
class GaussianDiagonal(_ProductMeasure):
    """Independent normal coordinates, optionally truncated to R_+.

    @param mean:        Means m_i.
    @param stddev:      Standard deviations s_i >= 0 (0 = degenerate at m_i).
    @param truncate:    (optional) Per coordinate, condition the law on ξ_i >= 0.
    """

    def __init__(self, mean, stddev, truncate=None):
        mean = as_vector(mean, "mean")
        stddev = as_vector(stddev, "stddev", dimension=mean.size)
        if (stddev < 0.0).any():
            raise InvalidInputError("standard deviations should be >= 0")
        truncate = (
            np.zeros(mean.size, dtype=bool)
            if truncate is None
            else np.asarray(truncate, dtype=bool).reshape(mean.size)
        )
        if (truncate & (stddev == 0.0) & (mean < 0.0)).any():
            raise InvalidInputError("a degenerate truncated coordinate needs a mean >= 0")
        super().__init__(mean.size)
        self.mean = mean
        self.stddev = stddev
        self.truncate = truncate

    @property
    def active_coordinates(self):
        return [i for i in range(self.dimension) if self.stddev[i] > 0.0]

    def _degenerate_point(self):
        return self.mean.copy()

    def _lower_probability(self, i):
        # P(ξ_i < 0) for a truncated coordinate, 0 otherwise
        if not self.truncate[i]:
            return 0.0
        return float(norm.cdf(-self.mean[i] / self.stddev[i]))

    def _quantile(self, coordinate, u):
        p0 = self._lower_probability(coordinate)
        return self.mean[coordinate] + self.stddev[coordinate] * ndtri(p0 + u * (1.0 - p0))

    def _log_laplace_terms(self, v):
        terms = -v * self.mean + 0.5 * (v * self.stddev) ** 2
        for i in self.active_coordinates:
            if self.truncate[i]:
                s = self.stddev[i]
                terms[i] += log_ndtr((self.mean[i] - v[i] * s * s) / s) - log_ndtr(self.mean[i] / s)
        return terms

    def laplace(self, v):
        v = self._check_argument(v)
        return float(np.exp(np.sum(self._log_laplace_terms(v))))

    def laplace_gradient(self, v):
        v = self._check_argument(v)
        log_gradient = -self.mean + v * self.stddev**2
        for i in self.active_coordinates:
            if self.truncate[i]:
                s = self.stddev[i]
                d = (self.mean[i] - v[i] * s * s) / s
                mills = math.exp(norm.logpdf(d) - log_ndtr(d))
                log_gradient[i] -= s * mills
        return self.laplace(v) * log_gradient

    def sample(self, rng, size=None):
        count = 1 if size is None else int(size)
        draws = np.tile(self.mean, (count, 1))
        for i in self.active_coordinates:
            if self.truncate[i]:
                lower = -self.mean[i] / self.stddev[i]
                draws[:, i] = truncnorm.rvs(
                    lower, np.inf, loc=self.mean[i], scale=self.stddev[i],
                    size=count, random_state=rng,
                )
            else:
                draws[:, i] += self.stddev[i] * rng.standard_normal(count)
        return draws[0] if size is None else draws

    def support_bounds(self):
        lower = self.mean.copy()
        upper = self.mean.copy()
        for i in self.active_coordinates:
            lower[i] = 0.0 if self.truncate[i] else -np.inf
            upper[i] = np.inf
        return lower, upper

    def to_dict(self):
        return {
            "type": "gaussian",
            "mean": self.mean.tolist(),
            "stddev": self.stddev.tolist(),
            "truncate": self.truncate.tolist(),
        }

    def __repr__(self):
        return (
            f"GaussianDiagonal(mean={self.mean.tolist()}, stddev={self.stddev.tolist()}, "
            f"truncate={self.truncate.tolist()})"
        )


def laplace(measure, v):
    """Return Ψ(v) = ∫ exp(-<v, ξ>) Q(dξ) (see JumpMeasure.laplace)."""
    return measure.laplace(v)


def expect(measure, f, tol=DEFAULT_TOL):
    """Return ∫ f dQ within tol (see JumpMeasure.expect)."""
    if tol <= 0.0:
        raise InvalidInputError(f"tol should be > 0, got {tol}")
    return measure.expect(f, tol)


def sample(measure, rng, size=None):
    """Draw jump sizes from Q with the given numpy Generator."""
    return measure.sample(rng, size)
