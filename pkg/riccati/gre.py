"""Generalized Riccati equations dH/dτ = R(H), H(0) = 0, for separable term structures.

Component k of the right-hand side is

    R_k(v) = θ_k + <β_k, v> + vᵀ α_k v + γ_k(v)

where the quadratic part is stored as a signed matrix α_k (for a diffusion
matrix a it equals minus the a-weighted outer product of the basis gradients)
and γ_k is the jump functional.
"""
import logging
from typing import final

import numpy as np
from scipy.integrate import solve_ivp

from core.errors import AnchorSelectionError, ExplosionError, InvalidInputError
from core.helpers import as_vector, symmetrize, validate_positive
from core.measures import DEFAULT_TOL
from riccati.path import HPath
from riccati.separable import AffineBasis, psi_separable, psi_separable_gradient

logger = logging.getLogger(__name__)

ANCHOR_CONDITION_LIMIT = 1e10
ANCHOR_CANDIDATES = 256
BLOW_UP_LEVEL = 1e8
DEFAULT_MAX_STEP = 0.05


@final
class AffineJump:
    """Jump functional γ_k(v) = γ_k·(1 - Ψ(v_1 … v_n)) of an affine model."""

    def __init__(self, weights, jumps):
        self.weights = np.asarray(weights, dtype=float)
        self.jumps = jumps

    @property
    def inert(self):
        return self.jumps.is_dirac_zero or not self.weights.any()

    def value(self, v):
        if self.inert:
            return np.zeros_like(self.weights)
        return self.weights * (1.0 - self.jumps.laplace(v[1:]))

    def jacobian(self, v):
        jacobian = np.zeros((self.weights.size, self.weights.size))
        if not self.inert:
            jacobian[:, 1:] = -np.outer(self.weights, self.jumps.laplace_gradient(v[1:]))
        return jacobian


@final
class AnchoredJump:
    """Jump functional γ_k(v) = Σ_l W_kl psi_separable(v, x^l) over anchor points x^l."""

    def __init__(self, weights, basis, jumps, anchors, tol=DEFAULT_TOL):
        self.weights = np.asarray(weights, dtype=float)
        self.basis = basis
        self.jumps = jumps
        self.anchors = np.asarray(anchors, dtype=float)
        self.tol = tol

    def with_tol(self, tol):
        """Return a copy evaluating psi_separable to the given tolerance."""
        return AnchoredJump(self.weights, self.basis, self.jumps, self.anchors, tol)

    @property
    def inert(self):
        return self.jumps.is_dirac_zero or not self.weights.any()

    def value(self, v):
        if self.inert:
            return np.zeros(self.weights.shape[0])
        psi = np.array(
            [psi_separable(self.basis, self.jumps, v, anchor, self.tol) for anchor in self.anchors]
        )
        return self.weights @ psi

    def jacobian(self, v):
        size = self.weights.shape[0]
        if self.inert:
            return np.zeros((size, size))
        gradients = np.array(
            [
                psi_separable_gradient(self.basis, self.jumps, v, anchor, self.tol)
                for anchor in self.anchors
            ]
        )
        return self.weights @ gradients


@final
class GRESystem:
    """Right-hand side R(v) of the generalized Riccati equations.

    @param theta:   θ_k = h_k(0), shape (m,).
    @param beta:    β, shape (m, m); beta[k] is β_k.
    @param alpha:   Signed quadratic parts, shape (m, m, m); alpha[k] is symmetric.
    @param jump:    AffineJump, AnchoredJump or None.
    """

    def __init__(self, theta, beta, alpha, jump=None):
        self.theta = as_vector(theta, "theta")
        m = self.theta.size
        self.beta = np.asarray(beta, dtype=float).reshape(m, m)
        self.alpha = symmetrize(np.asarray(alpha, dtype=float).reshape(m, m, m))
        self.jump = jump
        for array in (self.theta, self.beta, self.alpha):
            array.setflags(write=False)

    @property
    def size(self):
        return self.theta.size

    def rhs(self, v):
        """Return R(v), shape (m,)."""
        v = np.asarray(v, dtype=float)
        value = self.theta + self.beta @ v + np.einsum("kij,i,j->k", self.alpha, v, v)
        if self.jump is not None:
            value = value + self.jump.value(v)
        return value

    def jacobian(self, v):
        """Return ∂R_k/∂v_j, shape (m, m)."""
        v = np.asarray(v, dtype=float)
        jacobian = self.beta + 2.0 * np.einsum("kij,j->ki", self.alpha, v)
        if self.jump is not None:
            jacobian = jacobian + self.jump.jacobian(v)
        return jacobian

    def __repr__(self):
        return f"GRESystem(m={self.size}, theta={self.theta.tolist()})"


def choose_anchors(basis, domain, count=None, candidates=ANCHOR_CANDIDATES, seed=0):
    """Pick anchor points greedily so the basis matrix has a large smallest singular value.

    @throw  AnchorSelectionError: If the best matrix found has condition >= 1e10.
    @retval numpy.ndarray of shape (count, n)
    """
    count = count or basis.size
    pool = domain.probe_points(candidates, seed=seed)
    values = np.array([basis.values(point) for point in pool])
    chosen = []
    for _ in range(count):
        best, best_score = None, -1.0
        for index in range(len(pool)):
            if index in chosen:
                continue
            rows = values[chosen + [index]]
            score = np.linalg.svd(rows, compute_uv=False)[-1]
            if score > best_score:
                best, best_score = index, score
        chosen.append(best)
    anchors = pool[chosen]
    condition = np.linalg.cond(values[chosen])
    if not condition < ANCHOR_CONDITION_LIMIT:
        raise AnchorSelectionError(
            f"best anchor matrix has condition number {condition:.3e}; try a larger or "
            "different domain box, or give anchors explicitly"
        )
    logger.debug("chose anchors %s (condition %.3e)", anchors.tolist(), condition)
    return anchors


def build_ode_system(family, model, anchors=None, tol=DEFAULT_TOL, theta=None):
    """Build the Riccati system of a separable family by evaluation at anchor points.

    With Φ_lk = φ_k(x^l) and W = Φ⁻¹, θ_k = h_k(0), β_k = Σ_l W_kl B(x^l),
    α_k = -Σ_l W_kl A(x^l) and γ_k(v) = Σ_l W_kl λ(x^l) psi_separable(v, x^l), where
    B_j(x) = Σ bᵢ∂ᵢφ_j + Σ aᵢⱼ∂ᵢⱼφ_j and A_jl(x) = Σ aᵢⱼ ∂ᵢφ_j ∂ⱼφ_l.

    @param  family:     SeparableFamily, or a StateBasis together with theta.
    @param  model:      JumpDiffusionModel of the same dimension.
    @param  anchors:    (optional) m distinct states; chosen greedily if omitted.
    @param  tol:        Quadrature tolerance of the jump functional.
    @param  theta:      (optional) h(0); taken from the family when omitted.
    @throw  AnchorSelectionError: If the anchor basis matrix is ill-conditioned.
    @retval GRESystem
    """
    basis = getattr(family, "basis", family)
    if theta is None:
        if not hasattr(family, "maturity"):
            raise InvalidInputError("theta (h(0)) is required when building from a basis")
        theta = family.maturity.h(0.0)
    theta = as_vector(theta, "theta", dimension=basis.size)
    if basis.dimension != model.dimension:
        raise InvalidInputError("basis and model dimensions differ")
    if anchors is None:
        anchors = choose_anchors(basis, model.domain)
    anchors = np.asarray(anchors, dtype=float).reshape(basis.size, basis.dimension)
    for anchor in anchors:
        model.domain.require(anchor, "anchor")

    phi = np.array([basis.values(anchor) for anchor in anchors])
    condition = np.linalg.cond(phi)
    if not condition < ANCHOR_CONDITION_LIMIT:
        raise AnchorSelectionError(
            f"basis matrix at the anchors has condition number {condition:.3e}; choose new anchors"
        )
    weights = np.linalg.inv(phi)

    B = np.empty((basis.size, basis.size))
    A = np.empty((basis.size, basis.size, basis.size))
    intensities = np.empty(basis.size)
    for l, anchor in enumerate(anchors):
        gradients = basis.gradients(anchor)
        a_value = model.a(anchor)
        B[l] = gradients @ model.b(anchor) + np.einsum("kij,ij->k", basis.hessians(anchor), a_value)
        A[l] = gradients @ a_value @ gradients.T
        intensities[l] = float(model.intensity(anchor))

    beta = weights @ B
    alpha = -np.einsum("kl,lij->kij", weights, A)
    jump = None
    if model.has_jumps and intensities.any():
        jump = AnchoredJump(weights * intensities, basis, model.jumps, anchors, tol)
    return GRESystem(theta, beta, alpha, jump)


def _embed(matrix, size):
    padded = np.zeros((size, size))
    padded[1:, 1:] = matrix
    return padded


def build_gre(model, theta=None):
    """Build the generalized Riccati equations of an affine model.

    Writing b(x) = b⁰ + Bx, a(x) = a⁰ + Σ xᵢaⁱ and λ(x) = λ⁰ + ℓ·x, and w = (v_1 … v_n):

        R_0(v) = θ_0 + <b⁰, w> - wᵀa⁰w + λ⁰(1 - Ψ(w))
        R_i(v) = θ_i + <B[:, i], w> - wᵀaⁱw + ℓ_i(1 - Ψ(w))

    @param  model:  Affine JumpDiffusionModel.
    @param  theta:  (optional) h(0) = (θ_0 … θ_n); defaults to the short rate r = x_1.
    @throw  InvalidInputError: Naming the coefficient that is not affine.
    @retval GRESystem of size n + 1
    """
    drift, diffusion, intensity = model.affine_coefficients()
    n = model.dimension
    m = n + 1
    if theta is None:
        theta = np.zeros(m)
        theta[1] = 1.0
    theta = as_vector(theta, "theta", dimension=m)

    beta = np.zeros((m, m))
    beta[0, 1:] = drift.constant
    beta[1:, 1:] = drift.linear.T
    alpha = np.empty((m, m, m))
    alpha[0] = -_embed(diffusion.constant, m)
    for i in range(n):
        alpha[i + 1] = -_embed(diffusion.linear[:, :, i], m)
    weights = np.concatenate(([float(intensity.constant)], intensity.linear))
    jump = AffineJump(weights, model.jumps) if model.has_jumps else None
    return GRESystem(theta, beta, alpha, jump)


def solve_gre(system, tau_max, rel_tol=1e-10, abs_tol=1e-12, max_step=DEFAULT_MAX_STEP):
    """Integrate dH/dτ = R(H), H(0) = 0 on [0, tau_max] with an adaptive 8(5,3) Runge-Kutta scheme.

    @param  system:     GRESystem.
    @param  tau_max:    Final maturity (> 0).
    @param  rel_tol:    Relative local error tolerance.
    @param  abs_tol:    Absolute local error tolerance.
    @param  max_step:   Largest step; bounds the Hermite interpolation error between nodes.
    @throw  ExplosionError: If |H| exceeds 1e8 or the integrator stalls.
    @retval HPath
    """
    tau_max = validate_positive(tau_max, "tau_max")
    rel_tol = validate_positive(rel_tol, "rel_tol")
    abs_tol = validate_positive(abs_tol, "abs_tol")
    if isinstance(system.jump, AnchoredJump) and system.jump.tol > abs_tol / 10.0:
        system = GRESystem(
            system.theta, system.beta, system.alpha, system.jump.with_tol(abs_tol / 10.0)
        )

    def blow_up(_tau, H):
        return BLOW_UP_LEVEL - np.max(np.abs(H))

    blow_up.terminal = True
    blow_up.direction = -1

    solution = solve_ivp(
        lambda _tau, H: system.rhs(H),
        (0.0, tau_max),
        np.zeros(system.size),
        method="DOP853",
        rtol=rel_tol,
        atol=abs_tol,
        max_step=min(max_step, tau_max),
        events=blow_up,
    )
    if solution.status == 1:
        tau = float(solution.t_events[0][0])
        raise ExplosionError(f"Riccati solution exceeds {BLOW_UP_LEVEL:g} at tau={tau:.6g}", tau)
    if solution.status != 0:
        tau = float(solution.t[-1])
        raise ExplosionError(f"Riccati integration stopped at tau={tau:.6g}: {solution.message}", tau)

    taus = solution.t
    H = solution.y.T.copy()
    H[0] = 0.0
    h = np.array([system.rhs(value) for value in H])
    diagnostics = {
        "steps": int(taus.size - 1),
        "rhs_evaluations": int(solution.nfev),
        "max_step_taken": float(np.max(np.diff(taus))),
        "local_error_bound": float(abs_tol + rel_tol * np.max(np.abs(H))),
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
    }
    logger.debug("solved %r on [0, %g]: %s", system, tau_max, diagnostics)
    return HPath(taus, H, h, system, diagnostics)

