"""This module tests the HJM drift against its closed forms."""
import math

import pytest

from core.errors import InvalidInputError
from core.measures import Discrete
from riccati.closed_form import hjm_gaussian_drift, hjm_jump_drift
from simulate.hjm import HJMInputs, hjm_drift

MARKS = Discrete([[1.0]], [1.0])


@pytest.mark.parametrize("t, T", [(0.0, 5.0), (1.0, 1.5), (2.0, 30.0)])
def test_gaussian_drift(t, T):
    inputs = HJMInputs.constant(0.01, 0.0, 0.0, MARKS)
    assert hjm_drift(inputs, t, T) == pytest.approx(hjm_gaussian_drift(0.01, t, T), abs=1e-10)


@pytest.mark.parametrize("t, T", [(0.0, 5.0), (1.0, 1.5)])
def test_jump_drift(t, T):
    inputs = HJMInputs.constant(0.0, 0.5, 2.0, MARKS)
    assert hjm_drift(inputs, t, T) == pytest.approx(hjm_jump_drift(0.5, 2.0, t, T), abs=1e-10)


def test_combined_drift():
    inputs = HJMInputs.constant(0.01, 0.5, 2.0, MARKS)
    expected = hjm_gaussian_drift(0.01, 0.0, 3.0) + hjm_jump_drift(0.5, 2.0, 0.0, 3.0)
    assert hjm_drift(inputs, 0.0, 3.0) == pytest.approx(expected, abs=1e-10)


def test_mark_dependent_loading():
    marks = Discrete([[1.0], [3.0]], [0.5, 0.5])
    inputs = HJMInputs(lambda t, T: 0.0, lambda t, T, y: 0.1 * y[0], marks, 1.0)
    expected = -0.5 * sum(0.1 * y * math.exp(-0.1 * y * 2.0) for y in (1.0, 3.0))
    assert hjm_drift(inputs, 0.0, 2.0) == pytest.approx(expected, abs=1e-10)


def test_boundaries():
    inputs = HJMInputs.constant(0.01, 0.5, 2.0, MARKS)
    assert hjm_drift(inputs, 3.0, 3.0) == 0.0
    with pytest.raises(InvalidInputError):
        hjm_drift(inputs, 3.0, 2.0)
    with pytest.raises(InvalidInputError):
        HJMInputs.constant(0.01, 0.5, -1.0, MARKS)
