"""This module tests the exp-polynomial algebra and the q-form coefficients."""
import numpy as np
import pytest

from core.helpers import symmetrize
from nelson_siegel.coefficients import (
    discrepancy_table,
    fitted_drift,
    ns_direct_lhs,
    ns_q_coefficients,
    q_form_exppoly,
    random_probe,
    transcribed_q_coefficients,
    verified_q_coefficients,
)
from nelson_siegel.exppoly import ExpPoly

PROBE_COUNT = 20


@pytest.fixture
def probes():
    rng = np.random.default_rng(7)
    return [random_probe(rng) for _ in range(PROBE_COUNT)]


def test_exppoly_arithmetic():
    p = ExpPoly({0: [1.0], 1: [0.0, 2.0]})
    q = ExpPoly({1: [3.0]})
    for tau in (0.0, 0.4, 3.0):
        assert (p * q)(tau, 0.8) == pytest.approx(p(tau, 0.8) * q(tau, 0.8), abs=1e-14)
        assert (p - q + 1.0)(tau, 0.8) == pytest.approx(p(tau, 0.8) - q(tau, 0.8) + 1.0, abs=1e-14)
    assert (p * q).degree(2) == 1
    assert (p * q).coefficients(2, 3).tolist() == [0.0, 6.0, 0.0, 0.0]
    assert (p - p).terms == {}
    assert (2.0 * p).coefficients(1, 1).tolist() == [0.0, 4.0]


def test_q_form_matches_direct_evaluation(probes):
    for x, a, b in probes:
        coefficients = verified_q_coefficients(x, a, b)
        q = q_form_exppoly(x, a, b)
        for tau in (0.1, 1.0, 6.0):
            direct = ns_direct_lhs(x, a, b, tau)
            assert coefficients.form(tau, x[3]) == pytest.approx(direct, abs=1e-10)
            assert q(tau, x[3]) == pytest.approx(direct, abs=1e-10)


def test_coefficient_anchors(probes):
    for x, a, b in probes:
        for variant in ("verified", "transcribed"):
            coefficients = ns_q_coefficients(x, a, b, variant)
            assert coefficients.q0[1] == pytest.approx(2.0 * a[0, 0], abs=1e-12)
            assert coefficients.q2[4] == pytest.approx(-2.0 * a[3, 3] * x[2] ** 2 / x[3], abs=1e-12)


def test_coefficient_shapes():
    x, a, b = [0.03, -0.01, 0.02, 0.5], np.zeros((4, 4)), np.zeros(4)
    coefficients = verified_q_coefficients(x, a, b)
    assert [block.size for block in coefficients.blocks()] == [2, 4, 5]
    assert set(coefficients.as_dict()) == {f"q{j}^{k}" for k, n in enumerate((2, 4, 5)) for j in range(n)}
    with pytest.raises(ValueError):
        ns_q_coefficients(x, a, b, "published")


def test_fitted_drift_closes_the_q_form():
    x = np.array([0.03, -0.01, 0.02, 0.5])
    drift = fitted_drift(x)
    np.testing.assert_allclose(drift, [0.0, 0.02 + 0.005, -0.01, 0.0], atol=1e-12)
    coefficients = verified_q_coefficients(x, np.zeros((4, 4)), drift)
    for block in coefficients.blocks():
        np.testing.assert_allclose(block, 0.0, atol=1e-12)


def test_transcribed_variant_without_diffusion_terms():
    x = np.array([0.03, -0.01, 0.02, 0.5])
    a = symmetrize(np.zeros((4, 4)))
    transcribed = transcribed_q_coefficients(x, a, fitted_drift(x))
    verified = verified_q_coefficients(x, a, fitted_drift(x))
    np.testing.assert_allclose(transcribed.q2, verified.q2, atol=1e-12)
    assert transcribed.q0[1] == verified.q0[1] == 0.0


def test_discrepancy_table():
    table = discrepancy_table(probes=PROBE_COUNT, seed=3)
    rows = {row["coefficient"]: row for row in table}
    assert len(rows) == 11
    assert not rows["q0^0"]["agree"]
    assert rows["q1^0"]["agree"]
    assert rows["q4^2"]["agree"]
    assert table == discrepancy_table(probes=PROBE_COUNT, seed=3)
