"""This module tests the recovery of (a, b, λ) from a curve family."""
import math

import numpy as np
import pytest

from core.errors import InvalidInputError
from core.measures import DiracZero, ExponentialProduct
from consistency.recovery import recover_coefficients, unknown_count
from riccati.gre import build_gre, solve_gre
from riccati.separable import AffineFamily
from tests.conftest import JUMP_INTENSITY, JUMP_RATE, KAPPA, MU, SIGMA
from tests.test_consistency.test_residual import flat_family

TAU_SAMPLES = np.linspace(0.5, 12.0, 12)


def test_unknown_count():
    assert unknown_count(1) == 3
    assert unknown_count(4) == 15


def test_vasicek_round_trip(vasicek_family):
    recovered = recover_coefficients(
        vasicek_family, ExponentialProduct([JUMP_RATE]), [0.03], TAU_SAMPLES
    )
    assert recovered.b[0] == pytest.approx(KAPPA * (MU - 0.03), abs=1e-6)
    assert recovered.a[0, 0] == pytest.approx(0.5 * SIGMA**2, abs=1e-6)
    assert recovered.intensity == pytest.approx(0.0, abs=1e-6)
    assert not recovered.rank_deficient


def test_jump_vasicek_round_trip(jump_vasicek_model):
    path = solve_gre(build_gre(jump_vasicek_model), 15.0)
    nodes = path.taus[np.linspace(1, path.taus.size - 1, 12).astype(int)]
    recovered = recover_coefficients(AffineFamily(path, 1), jump_vasicek_model.jumps, [0.03], nodes)
    assert recovered.intensity == pytest.approx(JUMP_INTENSITY, abs=1e-4)
    assert recovered.b[0] == pytest.approx(KAPPA * (MU - 0.03), abs=1e-4)


def test_flat_family_is_rank_deficient():
    recovered = recover_coefficients(flat_family(), DiracZero(1), [0.05], TAU_SAMPLES)
    assert recovered.rank_deficient
    assert math.isinf(recovered.condition_number)
    assert recovered.b[0] == pytest.approx(0.0, abs=1e-12)
    assert recovered.a[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert recovered.to_dict()["rank_deficient"] is True


def test_too_few_maturities(vasicek_family):
    with pytest.raises(InvalidInputError):
        recover_coefficients(vasicek_family, DiracZero(1), [0.03], [1.0, 2.0])
