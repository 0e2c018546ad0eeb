"""Separable forward curves G(τ, x) = Σ_k h_k(τ) φ_k(x)."""
import logging
import math
from abc import ABCMeta, abstractmethod
from typing import final

import numpy as np

from core.domain import DomainBox
from core.errors import (
    AccuracyError,
    DivergentIntegralError,
    InvalidInputError,
    RangeError,
    RegularityError,
)
from core.helpers import as_vector
from core.measures import DEFAULT_TOL, expect
from families.interface import ForwardCurveFamily

logger = logging.getLogger(__name__)


class StateBasis(metaclass=ABCMeta):
    """Basis functions φ_0 … φ_{m-1} of the state with their derivatives."""

    def __init__(self, dimension, size):
        self.dimension = int(dimension)
        self.size = int(size)

    @abstractmethod
    def values(self, x):
        """Return φ(x), shape (m,)."""

    @abstractmethod
    def gradients(self, x):
        """Return ∂φ_k/∂x_i as an array of shape (m, n)."""

    @abstractmethod
    def hessians(self, x):
        """Return ∂²φ_k/∂x_i∂x_j as an array of shape (m, n, n)."""

    @property
    def is_affine(self):
        return False


@final
class AffineBasis(StateBasis):
    """φ_0 = 1 and φ_k = x_k: the affine term structures."""

    def __init__(self, dimension):
        super().__init__(dimension, dimension + 1)

    @property
    def is_affine(self):
        return True

    def values(self, x):
        return np.concatenate(([1.0], np.asarray(x, dtype=float)))

    def gradients(self, x):
        return np.vstack((np.zeros(self.dimension), np.eye(self.dimension)))

    def hessians(self, x):
        return np.zeros((self.size, self.dimension, self.dimension))

    def __repr__(self):
        return f"AffineBasis(dimension={self.dimension})"


@final
class QuadraticBasis(StateBasis):
    """φ = (1, x_1 … x_n, x_i x_j for i <= j)."""

    def __init__(self, dimension):
        pairs = [(i, j) for i in range(dimension) for j in range(i, dimension)]
        super().__init__(dimension, 1 + dimension + len(pairs))
        self.pairs = pairs

    def values(self, x):
        x = np.asarray(x, dtype=float)
        return np.concatenate(([1.0], x, [x[i] * x[j] for i, j in self.pairs]))

    def gradients(self, x):
        x = np.asarray(x, dtype=float)
        n = self.dimension
        gradients = np.zeros((self.size, n))
        gradients[1 : n + 1] = np.eye(n)
        for offset, (i, j) in enumerate(self.pairs):
            gradients[n + 1 + offset, i] += x[j]
            gradients[n + 1 + offset, j] += x[i]
        return gradients

    def hessians(self, x):
        n = self.dimension
        hessians = np.zeros((self.size, n, n))
        for offset, (i, j) in enumerate(self.pairs):
            hessians[n + 1 + offset, i, j] += 1.0
            hessians[n + 1 + offset, j, i] += 1.0
        return hessians

    def __repr__(self):
        return f"QuadraticBasis(dimension={self.dimension})"


BASES = {"affine": AffineBasis, "quadratic": QuadraticBasis}


def make_basis(name, dimension):
    """Return the named state basis ("affine" or "quadratic")."""
    try:
        return BASES[name](dimension)
    except KeyError as e:
        raise InvalidInputError(f"unknown basis {name!r}; use one of {sorted(BASES)}") from e


@final
class ClosedFormMaturity:
    """Maturity functions H_k, h_k = H_k' and h_k' given as callables of τ.

    @param H:       Callable τ -> array (m,), with H(0) = 0.
    @param h:       Callable τ -> array (m,).
    @param dh:      Callable τ -> array (m,).
    """

    tau_max = math.inf

    def __init__(self, H, h, dh):
        self._H, self._h, self._dh = H, h, dh

    def H(self, tau):
        return np.zeros_like(self._h(0.0), dtype=float) if tau == 0.0 else np.asarray(self._H(tau), dtype=float)

    def h(self, tau):
        return np.asarray(self._h(tau), dtype=float)

    def dh(self, tau):
        return np.asarray(self._dh(tau), dtype=float)

    @property
    def size(self):
        return self.h(0.0).size


class SeparableFamily(ForwardCurveFamily):
    """Forward curve family G(τ, x) = Σ h_k(τ) φ_k(x).

    @param basis:       StateBasis φ.
    @param maturity:    Object with methods H(τ), h(τ), dh(τ) returning arrays of
                        length m and an attribute tau_max (an HPath or a
                        ClosedFormMaturity).
    @param domain:      (optional) DomainBox; defaults to R^n.
    """

    def __init__(self, basis, maturity, domain=None):
        super().__init__(domain or DomainBox.unbounded(basis.dimension))
        if domain is not None and domain.dimension != basis.dimension:
            raise InvalidInputError("domain and basis dimensions differ")
        if maturity.h(0.0).size != basis.size:
            raise InvalidInputError(
                f"maturity functions have {maturity.h(0.0).size} components, basis has {basis.size}"
            )
        self.basis = basis
        self.maturity = maturity

    def check_arguments(self, tau, x, name="x"):
        tau, x = super().check_arguments(tau, x, name)
        if tau > self.maturity.tau_max:
            raise RangeError(f"tau={tau} is beyond the maturity range {self.maturity.tau_max}")
        return tau, x

    def value(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return float(self.maturity.h(tau) @ self.basis.values(x))

    def dtau(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return float(self.maturity.dh(tau) @ self.basis.values(x))

    def gradient(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return self.maturity.h(tau) @ self.basis.gradients(x)

    def hessian(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return np.tensordot(self.maturity.h(tau), self.basis.hessians(x), axes=1)

    def integral(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        if tau == 0.0:
            return 0.0
        return float(self.maturity.H(tau) @ self.basis.values(x))

    def integral_gradient(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        if tau == 0.0:
            return np.zeros(self.dimension)
        return self.maturity.H(tau) @ self.basis.gradients(x)

    def integral_hessian(self, tau, x):
        tau, x = self.check_arguments(tau, x)
        return np.tensordot(self.maturity.H(tau), self.basis.hessians(x), axes=1)


@final
class AffineFamily(SeparableFamily):
    """Affine family G(τ, x) = h_0(τ) + Σ h_i(τ) x_i backed by maturity functions."""

    def __init__(self, maturity, dimension=None, domain=None):
        dimension = dimension or maturity.h(0.0).size - 1
        super().__init__(AffineBasis(dimension), maturity, domain)


def _maturity_vector(family, H_vals):
    return as_vector(H_vals, "H_vals", dimension=family.basis.size)


def gamma_big(family, H_vals, x, i):
    """Return Γᵢ = Σ_k H_k ∂φ_k/∂xᵢ (x)."""
    x = family.domain.require(x)
    if not 0 <= i < family.dimension:
        raise InvalidInputError(f"index {i} out of range for dimension {family.dimension}")
    return float(_maturity_vector(family, H_vals) @ family.basis.gradients(x)[:, i])


def lambda_big(family, H_vals, x, i, j):
    """Return Λᵢⱼ = Σ_k H_k ∂²φ_k/∂xᵢ∂xⱼ (x)."""
    x = family.domain.require(x)
    n = family.dimension
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"indices ({i}, {j}) out of range for dimension {n}")
    return float(_maturity_vector(family, H_vals) @ family.basis.hessians(x)[:, i, j])


def psi_separable(basis, jumps, v, x, tol=DEFAULT_TOL):
    """Return ∫ (1 - exp(-<v, φ(x+ξ) - φ(x)>)) Q(dξ).

    For the affine basis this is 1 - Ψ(v_1 … v_n) with Ψ the Laplace transform of Q.

    @param  basis:  StateBasis, or a SeparableFamily whose basis is used.
    @throw  RegularityError: If the integral diverges or fails to converge.
    """
    basis = getattr(basis, "basis", basis)
    v = as_vector(v, "v", dimension=basis.size)
    if jumps.is_dirac_zero or not v.any():
        return 0.0
    x = np.asarray(x, dtype=float)
    try:
        if basis.is_affine:
            return 1.0 - jumps.laplace(v[1:])
        base = basis.values(x)
        return expect(jumps, lambda xi: -math.expm1(-(v @ (basis.values(x + xi) - base))), tol)
    except (DivergentIntegralError, AccuracyError, OverflowError) as e:
        raise RegularityError(f"jump functional diverges at v={v.tolist()}: {e}") from e


def psi_separable_gradient(basis, jumps, v, x, tol=DEFAULT_TOL):
    """Return the v-gradient of psi_separable, ∫ Δφ·exp(-<v, Δφ>) Q(dξ)."""
    basis = getattr(basis, "basis", basis)
    v = as_vector(v, "v", dimension=basis.size)
    if jumps.is_dirac_zero:
        return np.zeros(basis.size)
    if basis.is_affine:
        return np.concatenate(([0.0], -jumps.laplace_gradient(v[1:])))
    x = np.asarray(x, dtype=float)
    base = basis.values(x)

    def component(k):
        def integrand(xi):
            increment = basis.values(x + xi) - base
            return increment[k] * math.exp(-(v @ increment))

        return expect(jumps, integrand, tol)

    return np.array([component(k) for k in range(basis.size)])


def separable_residual(model, family, tau, x, tol=DEFAULT_TOL):
    """Return the separable consistency residual at (τ, x).

    Σ (h_k(τ) - h_k(0)) φ_k(x) - [Σ Γᵢbᵢ + Σ aᵢⱼ(Λᵢⱼ - ΓᵢΓⱼ) + λ(x) psi_separable(H(τ), x)]
    """
    tau, x = family.check_arguments(tau, x)
    H_vals = family.maturity.H(tau)
    phi = family.basis.values(x)
    gamma = H_vals @ family.basis.gradients(x)
    lam = np.tensordot(H_vals, family.basis.hessians(x), axes=1)
    a_value = model.a(x)
    lhs = float((family.maturity.h(tau) - family.maturity.h(0.0)) @ phi)
    rhs = float(gamma @ model.b(x)) + float(np.sum(a_value * (lam - np.outer(gamma, gamma))))
    intensity = float(model.intensity(x))
    if intensity != 0.0:
        rhs += intensity * psi_separable(family.basis, model.jumps, H_vals, x, tol)
    return lhs - rhs
