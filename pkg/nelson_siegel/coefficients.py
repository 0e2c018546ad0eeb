"""Coefficients of the Nelson-Siegel q-form q⁰(τ) + q¹(τ)e^{-x₄τ} + q²(τ)e^{-2x₄τ}.

The q-form is the non-jump side of the consistency condition for the
Nelson-Siegel family,

    q = ∂τG - Σ bᵢ∂ᵢG - Σ aᵢⱼ∂ᵢⱼG + 2 Σ aᵢⱼ∂ᵢG·I∇ⱼ,

with q⁰, q¹, q² polynomials in τ of degree at most 1, 3 and 4. The sign is
fixed by q₁⁰ = 2a₁₁. Two coefficient sets are provided: "transcribed" copies the
published closed forms term by term, "verified" reads them off the exact
exp-polynomial expansion of q.
"""
import logging
from dataclasses import dataclass
from typing import final

import numpy as np

from core.helpers import as_matrix, as_vector, symmetrize
from nelson_siegel.exppoly import ExpPoly
from nelson_siegel.family import ns_gradients, ns_integral_gradient, ns_state

logger = logging.getLogger(__name__)

DEGREES = (1, 3, 4)
AGREEMENT_TOL = 1e-9
VARIANTS = ("verified", "transcribed")


@final
@dataclass(frozen=True)
class NSQCoefficients:
    """q-form coefficients at one (x, a, b); q[k][j] multiplies τ^j e^{-k x₄ τ}."""

    q0: np.ndarray
    q1: np.ndarray
    q2: np.ndarray

    def blocks(self):
        return (self.q0, self.q1, self.q2)

    def as_dict(self):
        """Return {"q{j}^{k}": value} for every coefficient."""
        return {
            f"q{j}^{k}": float(value)
            for k, block in enumerate(self.blocks())
            for j, value in enumerate(block)
        }

    def form(self, tau, decay_rate):
        """Evaluate q⁰(τ) + q¹(τ)e^{-x₄τ} + q²(τ)e^{-2x₄τ}."""
        total = 0.0
        for k, block in enumerate(self.blocks()):
            total += np.polynomial.polynomial.polyval(tau, block) * np.exp(-k * decay_rate * tau)
        return float(total)


def _inputs(x, a, b):
    x = ns_state(x)
    a = symmetrize(as_matrix(a, "a", shape=(4, 4)))
    b = as_vector(b, "b", dimension=4)
    return x, a, b


def _exppoly_terms(x):
    """Return (∂τG, ∇G, Hessian, I∇) of the Nelson-Siegel curve as exp-polynomials."""
    _, x2, x3, x4 = x
    E = ExpPoly.monomial(1, 0)
    tau = ExpPoly.monomial(0, 1)
    level = ExpPoly({1: [x2, x3]})
    dtau = ExpPoly({1: [x3 - x4 * x2, -x3 * x4]})
    gradient = [ExpPoly.constant(1.0), E, ExpPoly.monomial(1, 1), -(tau * level)]
    zero = ExpPoly()
    hessian = [[zero] * 4 for _ in range(4)]
    hessian[1][3] = hessian[3][1] = -ExpPoly.monomial(1, 1)
    hessian[2][3] = hessian[3][2] = -ExpPoly.monomial(1, 2)
    hessian[3][3] = tau * tau * level
    # ∫₀^τ u^k e^{-x₄u} du as exp-polynomials
    moment0 = ExpPoly({0: [1.0 / x4], 1: [-1.0 / x4]})
    moment1 = ExpPoly({0: [1.0 / x4**2], 1: [-1.0 / x4**2, -1.0 / x4]})
    moment2 = ExpPoly({0: [2.0 / x4**3], 1: [-2.0 / x4**3, -2.0 / x4**2, -1.0 / x4]})
    integral_gradient = [tau, moment0, moment1, -x2 * moment1 - x3 * moment2]
    return dtau, gradient, hessian, integral_gradient


def q_form_exppoly(x, a, b):
    """Return the q-form as an exact ExpPoly in τ."""
    x, a, b = _inputs(x, a, b)
    dtau, gradient, hessian, integral_gradient = _exppoly_terms(x)
    q = dtau
    for i in range(4):
        q = q - b[i] * gradient[i]
        for j in range(4):
            if a[i, j] == 0.0:
                continue
            q = q - a[i, j] * hessian[i][j] + 2.0 * a[i, j] * (gradient[i] * integral_gradient[j])
    return q


def verified_q_coefficients(x, a, b):
    """Return the q-form coefficients read off the exact exp-polynomial expansion."""
    q = q_form_exppoly(x, a, b)
    for k, degree in enumerate(DEGREES):
        if q.degree(k) > degree:
            raise ArithmeticError(f"q{k} has degree {q.degree(k)} > {degree}")
    if any(k > 2 for k in q.terms):
        raise ArithmeticError("the q-form has terms beyond e^{-2x4τ}")
    return NSQCoefficients(*(q.coefficients(k, degree) for k, degree in enumerate(DEGREES)))


def transcribed_q_coefficients(x, a, b):
    """Return the published closed-form q coefficients, copied term by term.

    The constant term of q⁰ carries -2x₂/x₄ without a diffusion factor; the
    verified expansion has -2a₁₄x₂/x₄² there instead. discrepancy_table reports
    every coefficient on which the two sets disagree.
    """
    x, a, b = _inputs(x, a, b)
    _, x2, x3, x4 = x
    b1, b2, b3, b4 = b

    def A(i, j):
        return a[i - 1, j - 1]

    q0 = np.array([
        -b1 + 2 * A(1, 2) / x4 + 2 * A(1, 3) / x4**2 - 2 * x2 / x4 - 4 * A(1, 4) * x3 / x4**3,
        2 * A(1, 1),
    ])
    q1 = np.array([
        -b2 - x2 * x4 + x3 + 2 * A(2, 2) / x4 - 2 * A(1, 2) / x4 - 2 * A(2, 4) * x2 / x4**2
        - 2 * A(2, 4) * x3 / x4**3 - 2 * A(1, 3) / x4**2 + 2 * A(1, 4) * x2 / x4**2
        + 4 * A(1, 4) * x3 / x4**3 + 2 * A(2, 3) / x4**2,
        -b3 + b4 * x2 - x3 * x4 + 2 * A(1, 2) + 2 * A(2, 4) - 2 * A(1, 3) / x4
        + 2 * A(3, 3) / x4**2 + 4 * A(3, 4) * x2 / x4**2 + 2 * A(3, 4) * x3 / x4**2
        + 2 * A(4, 4) * x2**2 / x4**2 + 4 * A(4, 4) * x2 * x3 / x4**3
        + 2 * A(1, 4) * x2 / x4 + 4 * A(1, 4) * x3 / x4**2 + 2 * A(2, 3) / x4**2
        - 2 * A(2, 4) * x2 / x4,
        b4 * x3 - A(4, 4) * x2 + 2 * A(1, 3) + 2 * A(3, 4) - 2 * A(1, 4) * x2
        - 2 * A(2, 4) * x3 / x4 - 2 * A(3, 4) * x3 / x4**2 + 2 * A(4, 4) * x2 * x3 / x4**2
        + 4 * A(4, 4) * x3**2 / x4**3 + 2 * A(1, 4) * x3 / x4,
        -A(4, 4) * x3 - 2 * A(1, 4) * x3,
    ])
    q2 = np.array([
        -2 * A(2, 2) / x4 - 2 * A(2, 3) / x4**2 + 2 * A(2, 4) * x2 / x4 + 4 * A(2, 4) * x3 / x4**3,
        -4 * A(2, 3) / x4 + 4 * A(2, 4) * x2 / x4 + 4 * A(2, 4) * x3 / x4**2 - 2 * A(3, 3) / x4**2
        - 4 * A(3, 4) * x2 / x4**2 - 4 * A(3, 4) * x3 / x4**3 - 2 * A(4, 4) * x2**2 / x4**3
        - 4 * A(4, 4) * x2 * x3 / x4**3,
        4 * A(2, 4) * x3 / x4 - 2 * A(3, 3) / x4 - 4 * A(3, 4) * x2 / x4 - 6 * A(3, 4) * x3 / x4**2
        - 2 * A(4, 4) * x2**2 / x4 - 4 * A(4, 4) * x2 * x3 / x4**2 - 2 * A(4, 4) * x2 * x3 / x4
        - 4 * A(4, 4) * x3**2 / x4**3,
        -4 * A(3, 4) * x3 / x4 - 4 * A(4, 4) * x2 * x3 / x4 - 4 * A(4, 4) * x3**2 / x4**2,
        -2 * A(4, 4) * x3**2 / x4,
    ])
    return NSQCoefficients(q0, q1, q2)


def ns_q_coefficients(x, a, b, variant="verified"):
    """Return the q coefficients at (x, a, b) for the "verified" or "transcribed" variant."""
    if variant == "verified":
        return verified_q_coefficients(x, a, b)
    if variant == "transcribed":
        return transcribed_q_coefficients(x, a, b)
    raise ValueError(f"unknown variant {variant!r}; use one of {VARIANTS}")


def ns_direct_lhs(x, a, b, tau):
    """Evaluate the q-form at τ directly from the closed-form derivatives.

    Equals λ(x)·∫δ₀dQ minus the generic consistency residual of the
    Nelson-Siegel family.
    """
    x, a, b = _inputs(x, a, b)
    derivatives = ns_gradients(x, tau)
    integral_gradient = ns_integral_gradient(x, tau)
    return float(
        derivatives.dtau
        - derivatives.gradient @ b
        - np.sum(a * derivatives.hessian)
        + 2.0 * derivatives.gradient @ a @ integral_gradient
    )


def fitted_drift(x):
    """Return the drift that makes the q-form vanish identically when a = 0.

    The coefficients of q are affine in b; the minimum-norm solution of the
    matching system is returned (b = (0, x₃ - x₄x₂, -x₃x₄, 0)).
    """
    x = ns_state(x)
    zero = np.zeros((4, 4))

    def stacked(b):
        return np.concatenate(verified_q_coefficients(x, zero, b).blocks())

    base = stacked(np.zeros(4))
    matrix = np.column_stack([stacked(column) - base for column in np.eye(4)])
    solution, *_ = np.linalg.lstsq(matrix, -base, rcond=None)
    return solution


def random_probe(rng):
    """Draw a random (x, a, b) with x₄ in [0.05, 3] and a symmetric."""
    x = np.concatenate((rng.uniform(-0.1, 0.1, 3), rng.uniform(0.05, 3.0, 1)))
    raw = rng.normal(scale=0.01, size=(4, 4))
    return x, symmetrize(raw), rng.normal(scale=0.01, size=4)


def discrepancy_table(probes=20, seed=0):
    """Compare transcribed and verified coefficients at random probes.

    @retval list of dicts {coefficient, max_abs_difference, agree}
    """
    rng = np.random.default_rng(seed)
    differences = {}
    for _ in range(probes):
        x, a, b = random_probe(rng)
        verified = verified_q_coefficients(x, a, b).as_dict()
        transcribed = transcribed_q_coefficients(x, a, b).as_dict()
        for name, value in verified.items():
            difference = abs(value - transcribed[name])
            differences[name] = max(differences.get(name, 0.0), difference)
    table = [
        {
            "coefficient": name,
            "max_abs_difference": difference,
            "agree": difference <= AGREEMENT_TOL,
        }
        for name, difference in differences.items()
    ]
    mismatched = [row["coefficient"] for row in table if not row["agree"]]
    if mismatched:
        logger.warning("transcribed q coefficients differ from the expansion: %s", mismatched)
    return table
