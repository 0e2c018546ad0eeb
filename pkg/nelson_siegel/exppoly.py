"""Exact algebra of exp-polynomials Σ_k p_k(τ) e^{-k·r·τ} for a fixed rate r."""
from typing import final

import numpy as np
from numpy.polynomial import Polynomial


def _trim(poly):
    return Polynomial(np.trim_zeros(poly.coef, "b") if poly.coef.any() else [0.0])


@final
class ExpPoly:
    """Mapping k -> polynomial p_k(τ) representing Σ_k p_k(τ) e^{-k·r·τ}.

    @param terms:   Dict from the exponent multiple k >= 0 to a Polynomial or a
                    sequence of coefficients (lowest degree first).
    """

    # make numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, terms=None):
        self.terms = {}
        for k, poly in (terms or {}).items():
            poly = poly if isinstance(poly, Polynomial) else Polynomial(poly)
            if poly.coef.any():
                self.terms[int(k)] = _trim(poly)

    @classmethod
    def constant(cls, value):
        return cls({0: [value]})

    @classmethod
    def monomial(cls, k, degree, value=1.0):
        """Return value·τ^degree·e^{-k·r·τ}."""
        return cls({k: [0.0] * degree + [value]})

    def __add__(self, other):
        other = other if isinstance(other, ExpPoly) else ExpPoly.constant(other)
        terms = dict(self.terms)
        for k, poly in other.terms.items():
            terms[k] = terms[k] + poly if k in terms else poly
        return ExpPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({k: -poly for k, poly in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExpPoly):
            return ExpPoly({k: poly * float(other) for k, poly in self.terms.items()})
        result = ExpPoly()
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                result = result + ExpPoly({k1 + k2: p1 * p2})
        return result

    __rmul__ = __mul__

    def coefficients(self, k, degree):
        """Return the coefficients of τ⁰ … τ^degree in p_k (zero padded)."""
        coef = self.terms[k].coef if k in self.terms else np.zeros(1)
        padded = np.zeros(degree + 1)
        padded[: min(coef.size, degree + 1)] = coef[: degree + 1]
        return padded

    def degree(self, k):
        return self.terms[k].degree() if k in self.terms else -1

    def __call__(self, tau, rate):
        """Evaluate at τ for the decay rate r."""
        return float(sum(poly(tau) * np.exp(-k * rate * tau) for k, poly in self.terms.items()))

    def __repr__(self):
        return f"ExpPoly({ {k: poly.coef.tolist() for k, poly in self.terms.items()} })"
