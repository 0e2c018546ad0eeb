"""This module tests the pointwise consistency residual."""
import math

import numpy as np
import pytest

from core.coefficients import AffineCoefficient
from core.errors import RegularityError
from core.measures import DiracZero, Discrete, ExponentialProduct
from consistency.report import DEFAULT_TAU_GRID, residual_report
from consistency.residual import (
    consistency_residual,
    delta0,
    integrated_residual,
    jump_integral,
)
from riccati.gre import build_gre, solve_gre
from riccati.separable import AffineFamily, ClosedFormMaturity
from tests.conftest import KAPPA, MU, vasicek

EPSILON = 1e-3


def decaying_family():
    """Affine family with h₀ = 0, h₁(τ) = e^{-τ}, H₁(τ) = 1 - e^{-τ}."""
    return AffineFamily(
        ClosedFormMaturity(
            lambda tau: np.array([0.0, -math.expm1(-tau)]),
            lambda tau: np.array([0.0, math.exp(-tau)]),
            lambda tau: np.array([0.0, -math.exp(-tau)]),
        ),
        1,
    )


def flat_family():
    """G(τ, x) = x₁."""
    return AffineFamily(
        ClosedFormMaturity(
            lambda tau: np.array([0.0, tau]),
            lambda tau: np.array([0.0, 1.0]),
            lambda tau: np.array([0.0, 0.0]),
        ),
        1,
    )


def test_delta0_examples():
    family = decaying_family()
    assert delta0(family, [0.02], 1.0, [0.0]) == 0.0
    assert delta0(family, [0.02], 0.0, [0.1]) == pytest.approx(0.1, abs=1e-15)
    expected = 0.1 * math.exp(-1.0) * math.exp(-0.1 * (1.0 - math.exp(-1.0)))
    assert delta0(family, [0.02], 1.0, [0.1]) == pytest.approx(expected, abs=1e-15)


def test_jump_integral_of_simple_measures():
    family = decaying_family()
    assert jump_integral(family, DiracZero(1), [0.02], 1.0) == 0.0
    assert jump_integral(family, Discrete([[0.1]], [1.0]), [0.02], 1.0) == pytest.approx(
        delta0(family, [0.02], 1.0, [0.1]), abs=1e-15
    )


@pytest.mark.parametrize("tau", [0.5, 2.0, 8.0])
def test_jump_integral_exponential_closed_form(tau):
    """∫ h₁ξ e^{-H₁ξ} θe^{-θξ} dξ = h₁θ/(θ + H₁)²."""
    family = decaying_family()
    theta = 5.0
    h1 = math.exp(-tau)
    H1 = 1.0 - h1
    value = jump_integral(family, ExponentialProduct([theta]), [0.02], tau)
    assert value == pytest.approx(h1 * theta / (theta + H1) ** 2, abs=1e-9)


def test_flat_curve_with_zero_model_has_zero_residual():
    model = vasicek(kappa=0.0, mu=0.0, sigma=0.0)
    for tau in (0.0, 1.0, 10.0):
        assert consistency_residual(model, flat_family(), [0.05], tau).residual == 0.0


@pytest.mark.parametrize("tau", [0.0, 0.25, 1.0, 5.0, 10.0])
@pytest.mark.parametrize("x", [-0.02, 0.03, 0.1])
def test_vasicek_closed_form_is_consistent(vasicek_model, vasicek_family, tau, x):
    terms = consistency_residual(vasicek_model, vasicek_family, [x], tau)
    assert abs(terms.residual) < 1e-12
    assert terms.jump == 0.0


@pytest.mark.parametrize("tau", [0.5, 2.0, 10.0])
def test_perturbed_drift_residual_is_epsilon_h1(vasicek_model, vasicek_family, tau):
    shifted = vasicek_model.with_drift(AffineCoefficient([KAPPA * MU + EPSILON], [[-KAPPA]]))
    residual = consistency_residual(shifted, vasicek_family, [0.03], tau).residual
    assert residual == pytest.approx(EPSILON * math.exp(-KAPPA * tau), abs=1e-12)


def test_intensity_without_jumps_changes_nothing(vasicek_model, vasicek_family):
    busy = vasicek_model.with_intensity(AffineCoefficient(2.0, [1.0]))
    for tau in (1.0, 3.0):
        assert consistency_residual(busy, vasicek_family, [0.03], tau) == consistency_residual(
            vasicek_model, vasicek_family, [0.03], tau
        )


def test_jump_vasicek_riccati_family_is_consistent(jump_vasicek_model):
    path = solve_gre(build_gre(jump_vasicek_model), 10.0)
    family = AffineFamily(path, 1)
    for tau in (0.3, 1.0, 4.0, 9.5):
        for x in (0.0, 0.05):
            assert abs(consistency_residual(jump_vasicek_model, family, [x], tau).residual) < 1e-6


def test_jumps_leaving_the_domain_violate_regularity(cir_model):
    family = AffineFamily(flat_family().maturity, 1, domain=cir_model.domain)
    model = cir_model.with_intensity(AffineCoefficient(0.1, [0.0])).with_jumps(
        ExponentialProduct([10.0], signs=[-1.0])
    )
    with pytest.raises(RegularityError):
        consistency_residual(model, family, [0.05], 1.0)


@pytest.mark.parametrize("tau", [0.5, 3.0])
def test_integrated_form_vanishes_for_consistent_pairs(vasicek_model, vasicek_family, tau):
    assert abs(integrated_residual(vasicek_model, vasicek_family, [0.03], tau)) < 1e-12


def test_integrated_form_with_jumps(jump_vasicek_model):
    family = AffineFamily(solve_gre(build_gre(jump_vasicek_model), 5.0), 1)
    assert abs(integrated_residual(jump_vasicek_model, family, [0.03], 2.0)) < 1e-7


@pytest.mark.parametrize("model_name", ["vasicek_model", "cir_model", "jump_vasicek_model"])
def test_riccati_family_is_consistent_on_the_default_grid(request, model_name):
    model = request.getfixturevalue(model_name)
    path = solve_gre(build_gre(model), max(DEFAULT_TAU_GRID))
    report = residual_report(model, AffineFamily(path, model.dimension, model.domain))
    assert len(report.nodes) == 16 * len(DEFAULT_TAU_GRID)
    assert report.max_abs < 1e-6


@pytest.mark.parametrize("tau", [0.5, 2.0, 10.0])
def test_model_terms_add_up_over_superposed_models(tau):
    """The residual is affine in (b, a, λ): the model terms of a sum are the sums of the terms."""
    jumps = ExponentialProduct([20.0])
    first = vasicek(kappa=0.5, mu=0.04, sigma=0.02, intensity=0.3, jumps=jumps)
    second = vasicek(kappa=0.2, mu=0.1, sigma=0.03, intensity=0.1, jumps=jumps)
    both = vasicek(
        kappa=0.7, mu=(0.5 * 0.04 + 0.2 * 0.1) / 0.7, sigma=math.hypot(0.02, 0.03),
        intensity=0.4, jumps=jumps,
    )
    family = decaying_family()
    terms = [consistency_residual(model, family, [0.03], tau) for model in (first, second, both)]
    for name in ("drift", "diff", "cross", "jump"):
        assert getattr(terms[2], name) == pytest.approx(
            getattr(terms[0], name) + getattr(terms[1], name), abs=1e-12
        )
    assert terms[2].dtau == terms[0].dtau == terms[1].dtau


@pytest.mark.parametrize("tau", [0.5, 2.0, 10.0])
def test_integrated_form_differentiates_to_minus_the_residual(vasicek_model, vasicek_family, tau):
    shifted = vasicek_model.with_drift(AffineCoefficient([KAPPA * MU + EPSILON], [[-KAPPA]]))
    step = 1e-4
    derivative = (
        integrated_residual(shifted, vasicek_family, [0.03], tau + step)
        - integrated_residual(shifted, vasicek_family, [0.03], tau - step)
    ) / (2.0 * step)
    residual = consistency_residual(shifted, vasicek_family, [0.03], tau).residual
    assert residual == pytest.approx(EPSILON * math.exp(-KAPPA * tau), abs=1e-12)
    assert derivative == pytest.approx(-residual, abs=1e-9)
