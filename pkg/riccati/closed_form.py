"""Closed-form Riccati solutions of the preset models, used as references."""
import math

import numpy as np


def vasicek_H(kappa, mu, sigma, tau):
    """Return (H_0, H_1) of dX = κ(μ - X)dt + σdW with r = X."""
    H1 = -math.expm1(-kappa * tau) / kappa
    H0 = mu * (tau - H1) - sigma**2 / (2.0 * kappa**2) * (
        tau - 2.0 * H1 - math.expm1(-2.0 * kappa * tau) / (2.0 * kappa)
    )
    return H0, H1


def vasicek_bond_price(kappa, mu, sigma, x, tau):
    H0, H1 = vasicek_H(kappa, mu, sigma, tau)
    return math.exp(-H0 - H1 * x)


def cir_H1(kappa, sigma, tau):
    """Return H_1 solving H' = 1 - κH - ½σ²H², H(0) = 0."""
    gamma = math.sqrt(kappa**2 + 2.0 * sigma**2)
    growth = math.expm1(gamma * tau)
    return 2.0 * growth / ((gamma + kappa) * growth + 2.0 * gamma)


def pure_jump_H0(intensity, rate, tau):
    """Return H_0 = λ₀[τ - θ ln(1 + τ/θ)] of r = X with exponential jumps of rate θ."""
    return intensity * (tau - rate * math.log1p(tau / rate))


def hjm_gaussian_drift(sigma, t, T):
    """Drift σ²(T - t) of a constant-volatility forward rate without jumps."""
    return sigma**2 * (T - t)


def hjm_jump_drift(loading, rate, t, T):
    """Drift -ρν e^{-ρ(T - t)} of a constant jump loading ρ with mark rate ν and no diffusion."""
    return -loading * math.exp(-loading * (T - t)) * rate


def vasicek_h(kappa, mu, sigma, tau):
    """Return (h_0, h_1) = (H_0', H_1')."""
    _, H1 = vasicek_H(kappa, mu, sigma, tau)
    return np.array([kappa * mu * H1 - 0.5 * sigma**2 * H1**2, math.exp(-kappa * tau)])
