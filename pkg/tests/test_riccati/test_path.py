"""This module tests HPath evaluation, bond prices and yield curves."""
import numpy as np
import pytest

from core.errors import InvalidInputError, RangeError
from riccati.closed_form import vasicek_bond_price
from riccati.gre import build_gre, solve_gre
from riccati.path import HPath, affine_consistency_residual, bond_price, yield_curve
from tests.conftest import KAPPA, MU, SIGMA


@pytest.fixture
def vasicek_path(vasicek_model):
    return solve_gre(build_gre(vasicek_model), 10.0)


def test_bond_price_matches_closed_form(vasicek_path):
    assert bond_price(vasicek_path, [0.03], 0.0) == 1.0
    for tau in (0.5, 4.0, 10.0):
        assert bond_price(vasicek_path, [0.03], tau) == pytest.approx(
            vasicek_bond_price(KAPPA, MU, SIGMA, 0.03, tau), rel=1e-8
        )


def test_yield_curve_starts_at_short_rate(vasicek_path):
    curve = yield_curve(vasicek_path, [0.03], [0.0, 1.0, 5.0])
    assert [tau for tau, _, _ in curve] == [0.0, 1.0, 5.0]
    assert curve[0] == (0.0, 1.0, pytest.approx(0.03, abs=1e-15))
    for tau, price, rate in curve[1:]:
        assert rate == pytest.approx(-np.log(price) / tau)


def test_evaluation_beyond_range(vasicek_path):
    with pytest.raises(RangeError):
        vasicek_path.H(11.0)
    with pytest.raises(InvalidInputError):
        vasicek_path.h(-1.0)


def test_path_needs_zero_start():
    with pytest.raises(InvalidInputError):
        HPath([0.0, 1.0], [[0.1], [1.0]], [[1.0], [1.0]], dh=[[0.0], [0.0]])
    with pytest.raises(InvalidInputError):
        HPath([0.0, 1.0], [[0.0], [1.0]], [[1.0], [1.0]])


def test_affine_residual_of_solution_is_small(vasicek_model, jump_vasicek_model):
    for model in (vasicek_model, jump_vasicek_model):
        path = solve_gre(build_gre(model), 10.0)
        for tau in path.taus[::10]:
            assert abs(affine_consistency_residual(model, path, [0.03], tau)) < 1e-10


def test_perturbed_path_is_inconsistent(vasicek_model, vasicek_path):
    perturbed = vasicek_path.perturbed(1, 0.01)
    tau = vasicek_path.taus[20]
    assert abs(affine_consistency_residual(vasicek_model, perturbed, [0.0], tau)) > 1e-5
    assert perturbed.H(0.0).tolist() == [0.0, 0.0]


def test_to_csv(vasicek_path, tmp_path):
    vasicek_path.to_csv(tmp_path / "hpath.csv")
    lines = (tmp_path / "hpath.csv").read_text().splitlines()
    assert lines[0] == "tau,H_0,H_1,h_0,h_1"
    assert len(lines) == vasicek_path.taus.size + 1


def test_bond_price_decreases_while_forward_rates_are_positive(vasicek_path):
    taus = np.linspace(0.0, 10.0, 401)
    forwards = [vasicek_path.h(tau) @ [1.0, 0.03] for tau in taus]
    assert min(forwards) > 0.0
    prices = [bond_price(vasicek_path, [0.03], tau) for tau in taus]
    assert prices[0] == 1.0
    assert (np.diff(prices) < 0.0).all()
