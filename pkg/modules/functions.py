"""
Smooth functions with exact derivative oracles.

Every function takes an (N, D) array of points and an optional length-D
derivative specification and returns an (N,) array, the calling convention
RBF uses for its basis functions. Scalars and 1-D arrays are accepted for
convenience and promoted with ``as_points``.
"""

from __future__ import annotations

import itertools
import math
import numbers
from abc import ABC, abstractmethod
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InputError, UnsupportedFunctionError

Point = Tuple[float, ...]


def as_points(x, dim: int) -> np.ndarray:
    """Promote scalars, single points and point lists to an (N, dim) float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if dim != 1:
            raise InputError(f"A scalar is not a point in {dim} dimensions")
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        if dim == 1:
            return arr.reshape(-1, 1)
        if arr.shape[0] != dim:
            raise InputError(f"Expected a point with {dim} coordinates, got {arr.shape[0]}")
        return arr.reshape(1, dim)
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr
    raise InputError(f"Cannot interpret array of shape {arr.shape} as {dim}-D points")


def as_diff(diff, dim: int) -> Tuple[int, ...]:
    """Normalize a derivative specification (None, int or sequence) to a tuple."""
    if diff is None:
        return (0,) * dim
    if isinstance(diff, numbers.Integral):
        if dim != 1:
            raise InputError("An integer derivative order is only meaningful in 1-D")
        return (int(diff),)
    out = tuple(int(d) for d in diff)
    if len(out) != dim or any(d < 0 for d in out):
        raise InputError(f"Invalid multi-index {diff!r} for dimension {dim}")
    return out


def _merge_kinks(*groups: Iterable[Point]) -> Tuple[Point, ...]:
    return tuple(sorted({tuple(p) for group in groups for p in group}))


class SmoothFunction(ABC):
    """A function on R^dim with a derivative oracle.

    ``max_order`` is the highest total derivative order the oracle supports
    (``None`` for unlimited). ``kinks`` lists points where the oracle switches
    between smooth pieces; quadrature splits there.
    """

    dim: int = 1
    max_order: Optional[int] = None
    kinks: Tuple[Point, ...] = ()

    def __call__(self, x, diff=None) -> np.ndarray:
        points = as_points(x, self.dim)
        d = as_diff(diff, self.dim)
        if self.max_order is not None and sum(d) > self.max_order:
            raise UnsupportedFunctionError(
                f"{self!r} has no derivative oracle for multi-index {d}"
            )
        return self._evaluate(points, d)

    def value(self, x, diff=None) -> float:
        """Evaluate at a single point and return a float."""
        return float(self(x, diff)[0])

    @abstractmethod
    def _evaluate(self, x: np.ndarray, diff: Tuple[int, ...]) -> np.ndarray:
        ...

    def __add__(self, other):
        if isinstance(other, numbers.Real):
            other = Polynomial.constant(float(other), self.dim)
        if not isinstance(other, SmoothFunction):
            return NotImplemented
        return LinearCombination((self, other), (1.0, 1.0))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, numbers.Real):
            other = Polynomial.constant(float(other), self.dim)
        if not isinstance(other, SmoothFunction):
            return NotImplemented
        return LinearCombination((self, other), (1.0, -1.0))

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __neg__(self):
        return LinearCombination((self,), (-1.0,))

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return LinearCombination((self,), (float(other),))
        if isinstance(other, SmoothFunction):
            return Product(self, other)
        return NotImplemented

    __rmul__ = __mul__


class Polynomial(SmoothFunction):
    """Polynomial in 1 or 2 variables; ``coef[i, j]`` multiplies x1**i * x2**j."""

    def __init__(self, coef):
        c = np.atleast_1d(np.asarray(coef, dtype=float))
        if c.ndim not in (1, 2):
            raise InputError("Only univariate and bivariate polynomials are supported")
        self.coef = c
        self.dim = c.ndim

    @classmethod
    def constant(cls, value: float, dim: int = 1) -> "Polynomial":
        return cls(np.full((1,) * dim, value))

    @classmethod
    def monomial(cls, powers: Sequence[int], scale: float = 1.0) -> "Polynomial":
        powers = tuple(int(p) for p in powers)
        c = np.zeros(tuple(p + 1 for p in powers))
        c[powers] = scale
        return cls(c)

    @classmethod
    def coordinate(cls, axis: int, dim: int) -> "Polynomial":
        powers = [0] * dim
        powers[axis] = 1
        return cls.monomial(powers)

    def _evaluate(self, x, diff):
        c = self.coef
        for axis, order in enumerate(diff):
            if order:
                c = npoly.polyder(c, m=order, axis=axis)
        if self.dim == 1:
            return npoly.polyval(x[:, 0], c)
        return npoly.polyval2d(x[:, 0], x[:, 1], c)

    def __repr__(self):
        return f"Polynomial({self.coef.tolist()})"


class Sinusoid(SmoothFunction):
    """amplitude * sin(freq * x[axis] + phase)."""

    def __init__(self, freq: float, phase: float = 0.0, amplitude: float = 1.0,
                 axis: int = 0, dim: int = 1):
        self.freq = float(freq)
        self.phase = float(phase)
        self.amplitude = float(amplitude)
        self.axis = axis
        self.dim = dim

    def _evaluate(self, x, diff):
        if any(d for i, d in enumerate(diff) if i != self.axis):
            return np.zeros(len(x))
        k = diff[self.axis]
        arg = self.freq * x[:, self.axis] + self.phase
        # d^k/dx^k sin(wx + p) cycles through sin, cos, -sin, -cos
        base = (np.sin(arg), np.cos(arg), -np.sin(arg), -np.cos(arg))[k % 4]
        return self.amplitude * self.freq ** k * base

    def __repr__(self):
        return f"Sinusoid(freq={self.freq}, phase={self.phase}, amplitude={self.amplitude})"


class Exponential(SmoothFunction):
    """amplitude * exp(rate * x[axis])."""

    def __init__(self, rate: float, amplitude: float = 1.0, axis: int = 0, dim: int = 1):
        self.rate = float(rate)
        self.amplitude = float(amplitude)
        self.axis = axis
        self.dim = dim

    def _evaluate(self, x, diff):
        if any(d for i, d in enumerate(diff) if i != self.axis):
            return np.zeros(len(x))
        k = diff[self.axis]
        return self.amplitude * self.rate ** k * np.exp(self.rate * x[:, self.axis])

    def __repr__(self):
        return f"Exponential(rate={self.rate}, amplitude={self.amplitude})"


class LinearCombination(SmoothFunction):
    """sum_i coefficients[i] * functions[i]."""

    def __init__(self, functions: Sequence[SmoothFunction], coefficients: Sequence[float]):
        functions = tuple(functions)
        if not functions:
            raise InputError("A linear combination needs at least one function")
        if len(functions) != len(coefficients):
            raise InputError("Functions and coefficients must have the same length")
        dims = {f.dim for f in functions}
        if len(dims) != 1:
            raise InputError("Cannot combine functions of different dimensions")
        self.functions = functions
        self.coefficients = tuple(float(c) for c in coefficients)
        self.dim = dims.pop()
        orders = [f.max_order for f in functions if f.max_order is not None]
        self.max_order = min(orders) if orders else None
        self.kinks = _merge_kinks(*(f.kinks for f in functions))

    def _evaluate(self, x, diff):
        out = np.zeros(len(x))
        for c, f in zip(self.coefficients, self.functions):
            if c != 0.0:
                out += c * f._evaluate(x, diff)
        return out

    def __repr__(self):
        terms = " + ".join(f"{c:g}*{f!r}" for c, f in zip(self.coefficients, self.functions))
        return f"LinearCombination({terms})"


class Product(SmoothFunction):
    """Pointwise product; the oracle applies the multivariate Leibniz rule."""

    def __init__(self, left: SmoothFunction, right: SmoothFunction):
        if left.dim != right.dim:
            raise InputError("Cannot multiply functions of different dimensions")
        self.left = left
        self.right = right
        self.dim = left.dim
        orders = [f.max_order for f in (left, right) if f.max_order is not None]
        self.max_order = min(orders) if orders else None
        self.kinks = _merge_kinks(left.kinks, right.kinks)

    def _evaluate(self, x, diff):
        out = np.zeros(len(x))
        for beta in itertools.product(*(range(d + 1) for d in diff)):
            rest = tuple(d - b for d, b in zip(diff, beta))
            weight = math.prod(math.comb(d, b) for d, b in zip(diff, beta))
            out += weight * self.left._evaluate(x, beta) * self.right._evaluate(x, rest)
        return out

    def __repr__(self):
        return f"Product({self.left!r}, {self.right!r})"
