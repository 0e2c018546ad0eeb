"""This module tests the coefficient functions and the state model."""
import numpy as np
import pytest

from core.coefficients import AffineCoefficient, CallableCoefficient
from core.domain import DomainBox
from core.errors import InvalidInputError
from core.measures import DiracZero
from core.model import JumpDiffusionModel, diffusion_root, make_diffusion_matrix


def test_affine_coefficient_batches():
    drift = AffineCoefficient([0.02], [[-0.5]])
    assert drift([0.04]).tolist() == pytest.approx([0.0])
    batch = drift(np.array([[0.0], [0.04], [0.08]]))
    assert batch.shape == (3, 1)
    assert batch[:, 0] == pytest.approx([0.02, 0.0, -0.02])


def test_affine_coefficient_shape_mismatch():
    with pytest.raises(InvalidInputError):
        AffineCoefficient([0.0, 0.0], [[1.0]])


def test_callable_coefficient_is_not_affine():
    function = CallableCoefficient(lambda x: x**2, 2, (2,))
    assert not function.is_affine
    assert function([1.0, 3.0]).tolist() == [1.0, 9.0]
    with pytest.raises(InvalidInputError):
        function([1.0, 2.0, 3.0])


def test_diffusion_matrix_and_root_agree():
    c = np.array([[0.2, 0.0], [0.1, 0.3]])
    a = make_diffusion_matrix(c)
    assert np.allclose(a, 0.5 * c @ c.T)
    assert np.allclose(make_diffusion_matrix(diffusion_root(a)), a, atol=1e-15)


def test_vasicek_is_affine(vasicek_model):
    drift, a, intensity = vasicek_model.affine_coefficients()
    assert drift.linear.tolist() == [[-0.5]]
    assert a.constant[0, 0] == pytest.approx(0.5 * 0.02**2)
    assert float(intensity.constant) == 0.0
    assert not vasicek_model.has_jumps
    assert vasicek_model.validate() is vasicek_model


def test_cir_diffusion_matrix_is_state_dependent(cir_model):
    assert cir_model.a([0.04])[0, 0] == pytest.approx(0.5 * 0.1**2 * 0.04)
    assert cir_model.c([0.04])[0, 0] == pytest.approx(0.1 * 0.2)
    assert cir_model.is_affine


def test_state_dependent_volatility_is_not_affine():
    model = JumpDiffusionModel(
        domain=DomainBox.unbounded(1),
        drift=AffineCoefficient([0.0], [[0.0]]),
        intensity=AffineCoefficient.constant_value(0.0, 1),
        jumps=DiracZero(1),
        diffusion=AffineCoefficient([[0.0]], [[[0.1]]]),
    )
    assert not model.is_affine
    with pytest.raises(InvalidInputError, match="diffusion c"):
        model.affine_coefficients()


def test_negative_intensity_fails_validation(vasicek_model):
    model = vasicek_model.with_intensity(AffineCoefficient(-0.1, [0.0]))
    with pytest.raises(InvalidInputError, match="negative"):
        model.validate()


def test_mismatched_c_and_a_fail_validation():
    model = JumpDiffusionModel(
        domain=DomainBox.unbounded(1),
        drift=AffineCoefficient([0.0], [[0.0]]),
        intensity=AffineCoefficient.constant_value(0.0, 1),
        jumps=DiracZero(1),
        diffusion=AffineCoefficient.constant_value([[0.1]], 1),
        diffusion_matrix=AffineCoefficient.constant_value([[1.0]], 1),
    )
    with pytest.raises(InvalidInputError):
        model.validate()


def test_model_needs_a_diffusion():
    with pytest.raises(InvalidInputError):
        JumpDiffusionModel(
            domain=DomainBox.unbounded(1),
            drift=AffineCoefficient([0.0], [[0.0]]),
            intensity=AffineCoefficient.constant_value(0.0, 1),
            jumps=DiracZero(1),
        )


def test_jump_dimension_must_match(vasicek_model):
    with pytest.raises(InvalidInputError):
        vasicek_model.with_jumps(DiracZero(2))
