"""This module tests the quadrature wrappers and the output writers."""
import math

import numpy as np
import pytest

from core.errors import AccuracyError, DivergentIntegralError, InvalidInputError
from core.helpers import as_grid, as_vector, validate_number
from core.output import dumps_json, write_csv
from core.quadrature import integrate_interval, integrate_unit_cube


def test_interval_integral():
    assert integrate_interval(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-12)
    assert integrate_interval(math.exp, 2.0, 2.0) == 0.0


def test_unit_cube_integral():
    assert integrate_unit_cube(lambda u, v: u * v, 2) == pytest.approx(0.25, abs=1e-12)


def test_divergent_integral_is_reported():
    with pytest.raises((DivergentIntegralError, AccuracyError)):
        integrate_interval(lambda u: 1.0 / u, 0.0, 1.0)


def test_validation_helpers():
    assert validate_number(3, "x") == 3.0
    with pytest.raises(InvalidInputError):
        validate_number(True, "x")
    with pytest.raises(InvalidInputError):
        validate_number(math.inf, "x")
    with pytest.raises(InvalidInputError):
        as_vector([1.0, 2.0], "v", dimension=3)
    with pytest.raises(InvalidInputError):
        as_grid([], "taus")
    with pytest.raises(InvalidInputError):
        as_grid([1.0, -1.0], "taus")


def test_csv_is_rfc4180_with_round_trip_floats(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, ["tau", "value"], [[0.1, 1 / 3], [2.0, np.float64(1e-17)]])
    assert path.read_bytes() == b"tau,value\r\n0.1,0.3333333333333333\r\n2.0,1e-17\r\n"


def test_json_is_sorted_and_builtin():
    text = dumps_json({"b": np.array([1.0, 2.0]), "a": np.int64(3), "c": math.inf})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert '"inf"' in text
