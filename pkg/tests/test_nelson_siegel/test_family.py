"""This module tests the Nelson-Siegel curve and its closed-form derivatives."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from core.errors import DomainError
from nelson_siegel.family import (
    NelsonSiegelFamily,
    exp_moment,
    ns_G,
    ns_gradients,
    ns_integral,
    ns_integral_gradient,
    ns_integral_hessian,
    ns_log_f,
)
from nelson_siegel.scan import NS_PROBE_BOX

STATE = np.array([0.04, -0.02, 0.03, 0.7])
STEP = 1e-6


def central_difference(function, x, i):
    bump = np.zeros(4)
    bump[i] = STEP
    return (function(x + bump) - function(x - bump)) / (2.0 * STEP)


def test_curve_limits():
    assert ns_G(STATE, 0.0) == pytest.approx(0.02, abs=1e-15)
    assert ns_G(STATE, 1e3) == pytest.approx(0.04, abs=1e-12)
    with pytest.raises(DomainError):
        ns_G([0.04, -0.02, 0.03, 0.0], 1.0)


@pytest.mark.parametrize("tau", [0.3, 2.0, 7.5])
def test_gradient_matches_finite_differences(tau):
    derivatives = ns_gradients(STATE, tau)
    for i in range(4):
        assert derivatives.gradient[i] == pytest.approx(
            central_difference(lambda x: ns_G(x, tau), STATE, i), abs=1e-8
        )
        column = central_difference(lambda x: ns_gradients(x, tau).gradient, STATE, i)
        np.testing.assert_allclose(derivatives.hessian[:, i], column, atol=1e-7)
    dtau = (ns_G(STATE, tau + STEP) - ns_G(STATE, tau - STEP)) / (2.0 * STEP)
    assert derivatives.dtau == pytest.approx(dtau, abs=1e-8)


@pytest.mark.parametrize("tau", [0.0, 0.5, 4.0, 20.0])
def test_integrals_match_quadrature(tau):
    assert ns_integral(STATE, tau) == pytest.approx(quad(lambda u: ns_G(STATE, u), 0.0, tau)[0], abs=1e-12)
    for i in range(4):
        expected = quad(lambda u, i=i: ns_gradients(STATE, u).gradient[i], 0.0, tau)[0]
        assert ns_integral_gradient(STATE, tau)[i] == pytest.approx(expected, abs=1e-11)
        expected = quad(lambda u, i=i: ns_gradients(STATE, u).hessian[3, i], 0.0, tau)[0]
        assert ns_integral_hessian(STATE, tau)[3, i] == pytest.approx(expected, abs=1e-11)


def test_exp_moment_is_accurate_for_small_rates():
    assert exp_moment(0, 1e-12, 1.0) == pytest.approx(1.0, rel=1e-11)
    assert exp_moment(2, 1e-12, 3.0) == pytest.approx(9.0, rel=1e-9)
    assert exp_moment(1, 2.0, 0.0) == 0.0


def test_log_f():
    xi = np.array([0.01, 0.0, 0.0, 0.0])
    assert ns_log_f(STATE, xi, 2.0) == pytest.approx(-0.02, abs=1e-15)
    assert ns_log_f(STATE, xi, 0.0) == 0.0
    with pytest.raises(DomainError):
        ns_log_f(STATE, [0.0, 0.0, 0.0, -1.0], 1.0)


def test_family_interface():
    family = NelsonSiegelFamily()
    assert family.dimension == 4
    assert family.value(1.0, STATE) == ns_G(STATE, 1.0)
    assert not family.domain.contains([0.0, 0.0, 0.0, 0.0])
    assert math.isfinite(family.integral(30.0, STATE))


def random_states(count, seed):
    """States from the Nelson-Siegel probing box with maturities in [0.01, 30]."""
    states = NS_PROBE_BOX.probe_points(count, seed=seed)
    taus = np.random.default_rng(seed).uniform(0.01, 30.0, count)
    return list(zip(states, taus))


def precise_quad(function, tau):
    return quad(function, 0.0, tau, epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def test_derivatives_at_random_states():
    for state, tau in random_states(100, seed=5):
        derivatives = ns_gradients(state, tau)
        for i in range(4):
            assert derivatives.gradient[i] == pytest.approx(
                central_difference(lambda x, tau=tau: ns_G(x, tau), state, i), rel=1e-6, abs=1e-6
            )
            column = central_difference(lambda x, tau=tau: ns_gradients(x, tau).gradient, state, i)
            np.testing.assert_allclose(derivatives.hessian[:, i], column, rtol=1e-6, atol=1e-6)
        dtau = (ns_G(state, tau + STEP) - ns_G(state, tau - STEP)) / (2.0 * STEP)
        assert derivatives.dtau == pytest.approx(dtau, rel=1e-6, abs=1e-6)


def test_integrals_at_random_states():
    for state, tau in random_states(100, seed=6):
        assert ns_integral(state, tau) == pytest.approx(
            precise_quad(lambda u, x=state: ns_G(x, u), tau), abs=1e-9
        )
        gradient = ns_integral_gradient(state, tau)
        hessian = ns_integral_hessian(state, tau)
        for i in range(4):
            expected = precise_quad(lambda u, x=state, i=i: ns_gradients(x, u).gradient[i], tau)
            assert gradient[i] == pytest.approx(expected, abs=1e-9)
            expected = precise_quad(lambda u, x=state, i=i: ns_gradients(x, u).hessian[3, i], tau)
            assert hessian[3, i] == pytest.approx(expected, abs=1e-9)


def test_log_f_at_random_jumps():
    rng = np.random.default_rng(7)
    for state, tau in random_states(500, seed=7):
        xi = rng.uniform([-0.02, -0.02, -0.02, -0.05], [0.02, 0.02, 0.02, 0.05])
        expected = -precise_quad(lambda u, x=state, xi=xi: ns_G(x + xi, u) - ns_G(x, u), tau)
        assert ns_log_f(state, xi, tau) == pytest.approx(expected, abs=1e-9)
