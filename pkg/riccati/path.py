"""Solved maturity functions H_k(τ) with their derivatives, bond prices and yields."""
import logging
import math
from typing import final

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from core.errors import InvalidInputError, RangeError
from core.helpers import validate_number
from core.output import write_csv
from riccati.separable import AffineBasis

logger = logging.getLogger(__name__)

RANGE_SLACK = 1e-12


@final
class HPath:
    """H_k(τ) and h_k(τ) = H_k'(τ) on a strictly increasing τ grid starting at 0.

    Between nodes H is the cubic Hermite interpolant of (H, h) and h the cubic
    Hermite interpolant of (h, h'), where h' = J_R(H)·h comes from the system's
    Jacobian (or is given explicitly).

    @param taus:        Grid, strictly increasing, taus[0] = 0.
    @param H:           Array (nodes, m) with H[0] = 0.
    @param h:           Array (nodes, m).
    @param system:      (optional) GRESystem that produced the path.
    @param diagnostics: (optional) Solver diagnostics.
    @param dh:          (optional) Array (nodes, m) of h'; computed from system when omitted.
    """

    def __init__(self, taus, H, h, system=None, diagnostics=None, dh=None):
        taus = np.asarray(taus, dtype=float)
        H = np.asarray(H, dtype=float)
        h = np.asarray(h, dtype=float)
        if taus.ndim != 1 or taus.size < 2 or taus[0] != 0.0 or (np.diff(taus) <= 0.0).any():
            raise InvalidInputError("taus should be strictly increasing from 0 with >= 2 nodes")
        if H.shape != h.shape or H.shape[0] != taus.size:
            raise InvalidInputError("H and h should have one row per grid node")
        if H[0].any():
            raise InvalidInputError("H(0) should be 0")
        if dh is None:
            if system is None:
                raise InvalidInputError("either dh or the generating system is required")
            dh = np.array([system.jacobian(H_row) @ h_row for H_row, h_row in zip(H, h)])
        self.taus = taus
        self.H_nodes = H
        self.h_nodes = h
        self.dh_nodes = np.asarray(dh, dtype=float)
        self.system = system
        self.diagnostics = dict(diagnostics or {})
        self._H = CubicHermiteSpline(taus, H, h, axis=0)
        self._h = CubicHermiteSpline(taus, h, self.dh_nodes, axis=0)
        self._dh = self._h.derivative()

    @property
    def tau_max(self):
        return float(self.taus[-1])

    @property
    def size(self):
        return self.H_nodes.shape[1]

    def _check(self, tau):
        tau = validate_number(tau, "tau")
        if tau < 0.0:
            raise InvalidInputError(f"tau should be >= 0, got {tau}")
        if tau > self.tau_max + RANGE_SLACK:
            raise RangeError(f"tau={tau} is beyond the solved range [0, {self.tau_max}]")
        return min(tau, self.tau_max)

    def _node(self, tau):
        index = np.searchsorted(self.taus, tau)
        if index < self.taus.size and self.taus[index] == tau:
            return index
        return None

    def H(self, tau):
        """Return H(τ), shape (m,); exactly 0 at τ = 0."""
        tau = self._check(tau)
        node = self._node(tau)
        return self.H_nodes[node].copy() if node is not None else self._H(tau)

    def h(self, tau):
        """Return h(τ) = H'(τ), shape (m,)."""
        tau = self._check(tau)
        node = self._node(tau)
        return self.h_nodes[node].copy() if node is not None else self._h(tau)

    def dh(self, tau):
        """Return h'(τ), shape (m,)."""
        tau = self._check(tau)
        node = self._node(tau)
        return self.dh_nodes[node].copy() if node is not None else self._dh(tau)

    def perturbed(self, index, offset):
        """Return a copy with H_index shifted by offset at every node except τ = 0 (h unchanged)."""
        H = self.H_nodes.copy()
        H[1:, index] += offset
        return HPath(self.taus, H, self.h_nodes, self.system, self.diagnostics, self.dh_nodes)

    def to_csv(self, path):
        header = ["tau"] + [f"H_{k}" for k in range(self.size)] + [f"h_{k}" for k in range(self.size)]
        rows = (
            [tau, *H_row.tolist(), *h_row.tolist()]
            for tau, H_row, h_row in zip(self.taus, self.H_nodes, self.h_nodes)
        )
        write_csv(path, header, rows)


def bond_price(path, x, tau, basis=None):
    """Return P = exp(-Σ H_k(τ) φ_k(x)) (affine basis by default); exactly 1 at τ = 0.

    @throw  RangeError: If τ is beyond the solved range of the path.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    basis = basis or AffineBasis(x.size)
    H_vals = path.H(tau)
    if not H_vals.any():
        return 1.0
    return math.exp(-float(H_vals @ basis.values(x)))


def yield_curve(path, x, tau_grid, basis=None):
    """Return a list of (τ, price, yield) with y = -ln P / τ (the short rate at τ = 0)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    basis = basis or AffineBasis(x.size)
    curve = []
    for tau in np.atleast_1d(np.asarray(tau_grid, dtype=float)):
        price = bond_price(path, x, tau, basis)
        if tau == 0.0:
            rate = float(path.h(0.0) @ basis.values(x))
        else:
            rate = -math.log(price) / tau
        curve.append((float(tau), price, rate))
    return curve


def write_yield_curve(path, curve):
    write_csv(path, ["tau", "price", "yield"], ([tau, price, rate] for tau, price, rate in curve))


def affine_consistency_residual(model, path, x, tau):
    """Return the affine consistency residual of a path at (τ, x).

    (h_0(τ) - h_0(0)) + Σ (h_i(τ) - h_i(0))x_i - [<Γ, b(x)> - Γᵀa(x)Γ + λ(x)(1 - Ψ(Γ))]
    with Γ = (H_1(τ) … H_n(τ)); zero when the path solves the Riccati equations.
    """
    x = model.domain.require(x)
    phi = AffineBasis(model.dimension).values(x)
    H_vals = path.H(tau)
    gamma = H_vals[1:]
    lhs = float((path.h(tau) - path.h(0.0)) @ phi)
    rhs = float(gamma @ model.b(x)) - float(gamma @ model.a(x) @ gamma)
    intensity = float(model.intensity(x))
    if intensity != 0.0 and model.has_jumps:
        rhs += intensity * (1.0 - model.jumps.laplace(gamma))
    return lhs - rhs
