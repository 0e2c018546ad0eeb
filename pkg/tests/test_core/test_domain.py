"""This module tests the domain box."""
import math

import numpy as np
import pytest

from core.domain import DomainBox
from core.errors import DomainError, InvalidInputError


def test_unbounded_box_contains_every_finite_point():
    box = DomainBox.unbounded(2)
    assert box.contains([1e12, -3.0])
    assert not box.contains([math.nan, 0.0])
    assert not box.contains([0.0])


def test_open_lower_bound_is_excluded():
    box = DomainBox(np.array([0.0]), np.array([math.inf]), open_lower=(True,))
    assert not box.contains([0.0])
    assert box.contains([1e-9])
    with pytest.raises(DomainError):
        box.require([0.0])


def test_empty_box_is_rejected():
    with pytest.raises(InvalidInputError):
        DomainBox(np.array([1.0]), np.array([0.0]))


def test_translates_by_the_support():
    box = DomainBox(np.array([0.0]), np.array([math.inf]))
    assert box.contains_translates(np.array([0.5]), np.array([0.0]), np.array([math.inf]))
    assert not box.contains_translates(np.array([0.5]), np.array([-math.inf]), np.array([0.0]))


@pytest.mark.parametrize("seed", [0, 7])
def test_probe_points_stay_inside(seed):
    box = DomainBox(
        np.array([-math.inf, 0.0, 2.0]),
        np.array([math.inf, math.inf, 3.0]),
        open_lower=(False, True, False),
    )
    points = box.probe_points(32, seed=seed)
    assert points.shape == (32, 3)
    assert all(box.contains(point) for point in points)
    assert np.array_equal(points, box.probe_points(32, seed=seed))
