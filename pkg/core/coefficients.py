"""Coefficient functions b, c, a and lambda of the state model.

A coefficient function maps states in R^n to values of a fixed output shape:
(n,) for the drift, (n, n) for the diffusion matrices and () for the jump
intensity. Every function accepts a single state of shape (n,) or a batch of
shape (k, n); batches return arrays of shape (k, *output_shape).
"""
from abc import ABCMeta, abstractmethod
from typing import final

import numpy as np

from core.errors import InvalidInputError


class CoefficientFunction(metaclass=ABCMeta):
    """Deterministic mapping R^n -> R^shape."""

    def __init__(self, input_dim, output_shape):
        if int(input_dim) <= 0:
            raise InvalidInputError("input_dim should be a positive integer")
        self.input_dim = int(input_dim)
        self.output_shape = tuple(int(s) for s in output_shape)

    @property
    def is_affine(self):
        return False

    @abstractmethod
    def _evaluate_batch(self, states):
        """Evaluate on an array of shape (k, n), returning (k, *output_shape)."""

    def __call__(self, x):
        states = np.asarray(x, dtype=float)
        single = states.ndim == 1
        if single:
            states = states[np.newaxis, :]
        if states.ndim != 2 or states.shape[1] != self.input_dim:
            raise InvalidInputError(
                f"expected states of dimension {self.input_dim}, got shape {np.shape(x)}"
            )
        values = np.asarray(self._evaluate_batch(states), dtype=float)
        values = values.reshape((states.shape[0],) + self.output_shape)
        return values[0] if single else values


@final
class AffineCoefficient(CoefficientFunction):
    """f(x) = constant + linear · x.

    @property constant: Array of shape output_shape.
    @property linear:   Array of shape output_shape + (n,); linear[..., i] is the
                        loading on x_i.
    """

    def __init__(self, constant, linear):
        constant = np.asarray(constant, dtype=float)
        linear = np.asarray(linear, dtype=float)
        if linear.shape[:-1] != constant.shape or linear.ndim < 1:
            raise InvalidInputError(
                f"linear part of shape {linear.shape} does not match constant of shape {constant.shape}"
            )
        if not (np.isfinite(constant).all() and np.isfinite(linear).all()):
            raise InvalidInputError("affine coefficients should be finite")
        super().__init__(linear.shape[-1], constant.shape)
        self.constant = constant
        self.linear = linear
        self.constant.setflags(write=False)
        self.linear.setflags(write=False)

    @classmethod
    def constant_value(cls, value, input_dim):
        """Return the constant function x -> value."""
        value = np.asarray(value, dtype=float)
        return cls(value, np.zeros(value.shape + (int(input_dim),)))

    @property
    def is_affine(self):
        return True

    def _evaluate_batch(self, states):
        return self.constant + np.tensordot(states, self.linear, axes=([1], [-1]))

    def __add__(self, other):
        if not isinstance(other, AffineCoefficient):
            return NotImplemented
        return AffineCoefficient(self.constant + other.constant, self.linear + other.linear)

    def __repr__(self):
        return f"AffineCoefficient(constant={self.constant.tolist()}, linear={self.linear.tolist()})"


@final
class CallableCoefficient(CoefficientFunction):
    """Coefficient given by an arbitrary Python callable.

    @param func:        Callable taking a state of shape (n,) (or a batch (k, n)
                        when vectorized is True).
    @param input_dim:   State dimension n.
    @param output_shape: Output shape of one evaluation.
    @param vectorized:  True if func accepts batches directly.
    """

    def __init__(self, func, input_dim, output_shape=(), vectorized=False, name=None):
        super().__init__(input_dim, output_shape)
        if not callable(func):
            raise InvalidInputError("func should be callable")
        self.func = func
        self.vectorized = vectorized
        self.name = name or getattr(func, "__name__", "callable")

    def _evaluate_batch(self, states):
        if self.vectorized:
            return self.func(states)
        return np.stack([np.asarray(self.func(state), dtype=float) for state in states])

    def __repr__(self):
        return f"CallableCoefficient({self.name}, input_dim={self.input_dim}, output_shape={self.output_shape})"
