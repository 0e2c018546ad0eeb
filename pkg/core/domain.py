"""Domain boxes: the concrete stand-in for the abstract state space of a model."""
from dataclasses import dataclass
from typing import final

import numpy as np
from scipy.stats import qmc

from core.errors import DomainError, InvalidInputError
from core.helpers import as_vector


@final
@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned box D = Π [lower_i, upper_i] (bounds may be infinite).

    @property lower:        Lower bounds, -inf allowed.
    @property upper:        Upper bounds, +inf allowed.
    @property open_lower:   Per coordinate, True when the lower bound is excluded
                            (e.g. the decay rate of a Nelson-Siegel curve).
    """

    lower: np.ndarray
    upper: np.ndarray
    open_lower: tuple = ()

    def __post_init__(self):
        lower = as_vector(self.lower, "lower", allow_infinite=True)
        upper = as_vector(self.upper, "upper", dimension=lower.size, allow_infinite=True)
        if (lower > upper).any():
            raise InvalidInputError(f"Empty domain box: lower {lower} > upper {upper}")
        open_lower = tuple(bool(flag) for flag in self.open_lower) or (False,) * lower.size
        if len(open_lower) != lower.size:
            raise InvalidInputError("open_lower should have one flag per coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "open_lower", open_lower)

    @classmethod
    def unbounded(cls, dimension):
        """Return the whole space R^n."""
        return cls(np.full(dimension, -np.inf), np.full(dimension, np.inf))

    @property
    def dimension(self):
        return self.lower.size

    def contains(self, x):
        """Return True if x lies in the box."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,) or not np.isfinite(x).all():
            return False
        above = np.where(self.open_lower, x > self.lower, x >= self.lower)
        return bool(above.all() and (x <= self.upper).all())

    def require(self, x, name="x"):
        """Return x as an array, raising DomainError if it lies outside the box."""
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError(
                f"{name}={x.tolist()} is outside the domain box "
                f"[{self.lower.tolist()}, {self.upper.tolist()}]"
            )
        return x

    def contains_translates(self, x, support_lower, support_upper):
        """Return True if x + s stays in the box for every s in the support hull."""
        shifted_lower = x + support_lower
        shifted_upper = x + support_upper
        # inf - inf never occurs: support bounds are finite or signed infinities
        above = np.where(
            self.open_lower, shifted_lower > self.lower, shifted_lower >= self.lower
        )
        return bool(above.all() and (shifted_upper <= self.upper).all())

    def probing_window(self):
        """Return a finite (lower, upper) window inside the box used for grid scans."""
        lower = self.lower.copy()
        upper = self.upper.copy()
        for i in range(self.dimension):
            if np.isinf(lower[i]) and np.isinf(upper[i]):
                lower[i], upper[i] = -1.0, 1.0
            elif np.isinf(lower[i]):
                lower[i] = upper[i] - 1.0
            elif np.isinf(upper[i]):
                upper[i] = lower[i] + 1.0
        # keep away from an excluded lower bound
        span = upper - lower
        lower = np.where(self.open_lower, lower + 1e-3 * span, lower)
        return lower, upper

    def probe_points(self, count, seed=0):
        """Return count scrambled Halton points inside the probing window."""
        lower, upper = self.probing_window()
        sampler = qmc.Halton(d=self.dimension, scramble=True, seed=seed)
        unit = sampler.random(count)
        return qmc.scale(unit, lower, upper) if (upper > lower).all() else (
            lower + unit * (upper - lower)
        )
