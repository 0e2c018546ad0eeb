"""This module tests the numeric forward curve family against closed forms."""
import math

import numpy as np
import pytest

from core.domain import DomainBox
from core.errors import DomainError, InvalidInputError
from families.numeric import NumericCallableFamily
from nelson_siegel.family import NS_DOMAIN, NelsonSiegelFamily, ns_G
from riccati.closed_form import vasicek_H, vasicek_h


def vasicek_curve(tau, x):
    return float(vasicek_h(0.5, 0.04, 0.02, tau) @ np.array([1.0, x[0]]))


@pytest.fixture
def vasicek_family():
    return NumericCallableFamily(vasicek_curve, DomainBox.unbounded(1), name="vasicek")


@pytest.mark.parametrize("tau", [0.0, 0.5, 2.0, 10.0])
def test_integral_matches_riccati_closed_form(vasicek_family, tau):
    H0, H1 = vasicek_H(0.5, 0.04, 0.02, tau)
    assert vasicek_family.integral(tau, [0.03]) == pytest.approx(H0 + 0.03 * H1, abs=1e-10)
    assert vasicek_family.integral_gradient(tau, [0.03])[0] == pytest.approx(H1, abs=1e-7)


@pytest.mark.parametrize("tau", [0.0, 1.0, 5.0])
def test_tau_derivative(vasicek_family, tau):
    h_prime = -0.5 * math.exp(-0.5 * tau)
    _, H1 = vasicek_H(0.5, 0.04, 0.02, tau)
    h1 = math.exp(-0.5 * tau)
    h0_prime = 0.5 * 0.04 * h1 - 0.02**2 * H1 * h1
    assert vasicek_family.dtau(tau, [0.03]) == pytest.approx(h0_prime + 0.03 * h_prime, abs=1e-7)


def test_gradient_and_hessian_of_an_affine_curve(vasicek_family):
    assert vasicek_family.gradient(2.0, [0.03])[0] == pytest.approx(math.exp(-1.0), abs=1e-7)
    assert abs(vasicek_family.hessian(2.0, [0.03])[0, 0]) < 1e-5


def test_numeric_nelson_siegel_agrees_with_closed_form():
    numeric = NumericCallableFamily(lambda tau, x: ns_G(x, tau), NS_DOMAIN)
    exact = NelsonSiegelFamily()
    x = np.array([0.03, -0.01, 0.02, 0.7])
    for tau in (0.5, 3.0):
        assert numeric.gradient(tau, x) == pytest.approx(exact.gradient(tau, x), abs=1e-7)
        assert numeric.hessian(tau, x) == pytest.approx(exact.hessian(tau, x), abs=1e-5)
        assert numeric.integral(tau, x) == pytest.approx(exact.integral(tau, x), abs=1e-10)


def test_arguments_are_checked(vasicek_family):
    with pytest.raises(InvalidInputError):
        vasicek_family.value(-1.0, [0.03])
    with pytest.raises(DomainError):
        NumericCallableFamily(lambda tau, x: ns_G(x, tau), NS_DOMAIN).value(1.0, [0, 0, 0, 0.0])


def test_bond_price_and_short_rate(vasicek_family):
    assert vasicek_family.short_rate([0.03]) == pytest.approx(0.03, abs=1e-15)
    assert vasicek_family.bond_price(0.0, [0.03]) == 1.0
