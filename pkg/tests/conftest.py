"""Shared fixtures: the preset models used throughout the tests."""
import numpy as np
import pytest

from core.coefficients import AffineCoefficient
from core.domain import DomainBox
from core.measures import DiracZero, ExponentialProduct
from core.model import JumpDiffusionModel
from riccati.closed_form import vasicek_H, vasicek_h
from riccati.separable import AffineFamily, ClosedFormMaturity

KAPPA = 0.5
MU = 0.04
SIGMA = 0.02
CIR_SIGMA = 0.1
JUMP_INTENSITY = 0.3
JUMP_RATE = 50.0
PURE_JUMP_INTENSITY = 0.2


def vasicek(kappa=KAPPA, mu=MU, sigma=SIGMA, intensity=0.0, jumps=None):
    """dX = κ(μ - X)dt + σdW (+ jumps), short rate r = X."""
    return JumpDiffusionModel(
        domain=DomainBox.unbounded(1),
        drift=AffineCoefficient([kappa * mu], [[-kappa]]),
        intensity=AffineCoefficient.constant_value(intensity, 1),
        jumps=jumps or DiracZero(1),
        diffusion=AffineCoefficient.constant_value([[sigma]], 1),
        name="vasicek",
    )


@pytest.fixture
def vasicek_model():
    return vasicek()


@pytest.fixture
def cir_model():
    """Square-root diffusion a(x) = ½σ²x on x >= 0."""
    return JumpDiffusionModel(
        domain=DomainBox(np.array([0.0]), np.array([np.inf])),
        drift=AffineCoefficient([KAPPA * MU], [[-KAPPA]]),
        intensity=AffineCoefficient.constant_value(0.0, 1),
        jumps=DiracZero(1),
        diffusion_matrix=AffineCoefficient([[0.0]], [[[0.5 * CIR_SIGMA**2]]]),
        name="cir-like",
    )


@pytest.fixture
def jump_vasicek_model():
    return vasicek(intensity=JUMP_INTENSITY, jumps=ExponentialProduct([JUMP_RATE]))


@pytest.fixture
def pure_jump_model():
    """No drift and no diffusion; exponential upward jumps of rate θ = 50 at intensity 0.2."""
    return JumpDiffusionModel(
        domain=DomainBox.unbounded(1),
        drift=AffineCoefficient.constant_value([0.0], 1),
        intensity=AffineCoefficient.constant_value(PURE_JUMP_INTENSITY, 1),
        jumps=ExponentialProduct([JUMP_RATE]),
        diffusion=AffineCoefficient.constant_value([[0.0]], 1),
        name="pure-jump",
    )


def vasicek_maturity(kappa=KAPPA, mu=MU, sigma=SIGMA):
    """Closed-form maturity functions (H, h, h') of the Vasicek model."""

    def dh(tau):
        _, H1 = vasicek_H(kappa, mu, sigma, tau)
        h1 = np.exp(-kappa * tau)
        return np.array([kappa * mu * h1 - sigma**2 * H1 * h1, -kappa * h1])

    return ClosedFormMaturity(
        lambda tau: np.array(vasicek_H(kappa, mu, sigma, tau)),
        lambda tau: vasicek_h(kappa, mu, sigma, tau),
        dh,
    )


@pytest.fixture
def vasicek_family():
    """G(τ, x) = h₀(τ) + h₁(τ)x from the closed-form Vasicek solution."""
    return AffineFamily(vasicek_maturity(), 1)
