"""Helper functions for validating and normalising numerical input."""
import math

import numpy as np

from core.errors import InvalidInputError


def validate_number(value, name):
    """Validate whether value is a finite real number and return it as float.

    @param  value:  Value that needs to be tested.
    @param  name:   Name used in the error message.
    @throw  InvalidInputError: If value is not a finite real number.
    """
    if isinstance(value, bool):
        raise InvalidInputError(f"{name} should be a real number, got a bool")
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} should be a real number, got {value!r}") from e
    if not math.isfinite(number):
        raise InvalidInputError(f"{name} should be finite, got {number}")
    return number


def validate_positive(value, name, strict=True):
    """Validate whether value is a (strictly) positive finite number."""
    number = validate_number(value, name)
    if number < 0.0 or (strict and number == 0.0):
        bound = "> 0" if strict else ">= 0"
        raise InvalidInputError(f"{name} should be {bound}, got {number}")
    return number


def as_vector(value, name, dimension=None, allow_infinite=False):
    """Convert value to a 1-d float array and check its length and finiteness.

    @param  value:          Scalar or sequence of numbers.
    @param  name:           Name used in error messages.
    @param  dimension:      (optional) Expected length.
    @param  allow_infinite: Accept +/- inf entries (used for box bounds and rates).
    @throw  InvalidInputError: If the input cannot be converted, has the wrong
                               length or contains non-finite entries.
    @retval numpy.ndarray
    """
    try:
        vector = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} should be a sequence of numbers") from e
    if vector.ndim != 1:
        raise InvalidInputError(f"{name} should be one-dimensional, got shape {vector.shape}")
    if dimension is not None and vector.shape[0] != dimension:
        raise InvalidInputError(
            f"{name} should have length {dimension}, got {vector.shape[0]}"
        )
    bad = np.isnan(vector) if allow_infinite else ~np.isfinite(vector)
    if bad.any():
        raise InvalidInputError(f"{name} contains non-finite entries: {vector}")
    return vector


def as_matrix(value, name, shape=None):
    """Convert value to a finite 2-d float array, optionally checking its shape."""
    try:
        matrix = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"{name} should be a matrix of numbers") from e
    if matrix.ndim != 2:
        raise InvalidInputError(f"{name} should be two-dimensional, got shape {matrix.shape}")
    if shape is not None and matrix.shape != tuple(shape):
        raise InvalidInputError(f"{name} should have shape {tuple(shape)}, got {matrix.shape}")
    if not np.isfinite(matrix).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    return matrix


def as_grid(values, name, minimum=0.0):
    """Convert values to a non-empty 1-d grid with every node >= minimum."""
    grid = as_vector(values, name)
    if grid.size == 0:
        raise InvalidInputError(f"{name} should not be empty")
    if (grid < minimum).any():
        raise InvalidInputError(f"{name} should only contain values >= {minimum}")
    return grid


def symmetrize(matrix):
    """Return the symmetric part of a square matrix (or a stack of them)."""
    return 0.5 * (matrix + np.swapaxes(matrix, -1, -2))
