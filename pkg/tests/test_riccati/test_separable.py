"""This module tests the separable family helpers Γ, Λ and the jump functional."""
import math

import numpy as np
import pytest

from core.errors import InvalidInputError
from core.measures import DiracZero, Discrete, ExponentialProduct
from riccati.gre import build_gre, solve_gre
from riccati.separable import (
    AffineBasis,
    AffineFamily,
    ClosedFormMaturity,
    QuadraticBasis,
    SeparableFamily,
    gamma_big,
    lambda_big,
    make_basis,
    psi_separable,
    separable_residual,
)


@pytest.fixture
def quadratic_family():
    return SeparableFamily(
        QuadraticBasis(1),
        ClosedFormMaturity(
            lambda tau: np.array([0.0, 0.0, tau]),
            lambda tau: np.array([0.0, 0.0, 1.0]),
            lambda tau: np.zeros(3),
        ),
    )


def test_gamma_and_lambda_of_quadratic_basis(quadratic_family):
    assert gamma_big(quadratic_family, [0.0, 0.0, 2.0], [3.0], 0) == 12.0
    assert lambda_big(quadratic_family, [0.0, 0.0, 2.0], [3.0], 0, 0) == 4.0
    with pytest.raises(InvalidInputError):
        gamma_big(quadratic_family, [0.0, 0.0, 2.0], [3.0], 1)


def test_gamma_of_affine_basis_is_H(vasicek_family):
    assert gamma_big(vasicek_family, [0.4, 1.7], [0.02], 0) == 1.7
    assert lambda_big(vasicek_family, [0.4, 1.7], [0.02], 0, 0) == 0.0


def test_basis_shapes():
    basis = QuadraticBasis(2)
    assert basis.size == 6
    assert basis.values([2.0, 3.0]).tolist() == [1.0, 2.0, 3.0, 4.0, 6.0, 9.0]
    assert basis.hessians([2.0, 3.0])[4].tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert AffineBasis(2).size == 3
    assert isinstance(make_basis("affine", 2), AffineBasis)
    with pytest.raises(InvalidInputError):
        make_basis("cubic", 2)


def test_psi_of_affine_basis_is_one_minus_laplace():
    value = psi_separable(AffineBasis(1), ExponentialProduct([50.0]), [0.0, 0.5], [0.03])
    assert value == pytest.approx(1.0 - 50.0 / 50.5, abs=1e-15)
    assert psi_separable(AffineBasis(1), DiracZero(1), [0.0, 0.5], [0.03]) == 0.0


def test_psi_of_quadratic_basis():
    value = psi_separable(QuadraticBasis(1), Discrete([[0.1]], [1.0]), [0.0, 0.0, 1.0], [1.0])
    assert value == pytest.approx(-math.expm1(-0.21), abs=1e-14)


def test_family_maturity_size_must_match_basis():
    with pytest.raises(InvalidInputError):
        SeparableFamily(QuadraticBasis(1), ClosedFormMaturity(
            lambda tau: np.zeros(2), lambda tau: np.zeros(2), lambda tau: np.zeros(2)
        ))


def test_separable_residual_of_riccati_solution(jump_vasicek_model):
    path = solve_gre(build_gre(jump_vasicek_model), 5.0)
    family = AffineFamily(path, 1)
    for tau in path.taus[::10]:
        assert abs(separable_residual(jump_vasicek_model, family, tau, [0.03])) < 1e-10
