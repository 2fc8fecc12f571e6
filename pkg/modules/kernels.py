"""
Closed-form Green and reproducing kernels, their composition, Gram matrices and
the positive-definiteness verdict, and the numerical reproducing-property check.

Kernels follow the covariance-function convention of RBF/GPy: called with
(N, D) and (M, D) point arrays they return the (N, M) matrix, and ``diff``
differentiates with respect to the first argument.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from .core import Domain
from .errors import DomainError, InputError, KinkError, UnsupportedFunctionError
from .functions import SmoothFunction, as_diff, as_points
from .hilbert import NullSpacePair, SpaceDescriptor, hpb_inner

logger = logging.getLogger(__name__)

ROLES = ("G", "R", "K", "fundamental", "counterexample")
UNIT_INTERVAL = Domain.interval(0.0, 1.0)
UNIT_SQUARE = Domain.rectangle((0.0, 1.0), (0.0, 1.0))


class Kernel(ABC):
    """Symmetric bivariate function with a first-argument derivative oracle."""

    name: str = "kernel"
    role: str = "K"
    kinked: bool = False
    max_order: Optional[int] = None
    domain: Domain = UNIT_INTERVAL

    def __call__(self, x, y, diff=None) -> np.ndarray:
        dim = self.domain.dim
        X, Y = as_points(x, dim), as_points(y, dim)
        d = as_diff(diff, dim)
        order = sum(d)
        if self.max_order is not None and order > self.max_order:
            raise UnsupportedFunctionError(f"{self.name} has no derivative oracle for {d}")
        if self.kinked and order >= 1:
            on_kink = np.all(X[:, None, :] == Y[None, :, :], axis=2)
            if on_kink.any():
                raise KinkError(
                    f"{self.name} is not differentiable on its diagonal; "
                    "split the quadrature at the kink instead of evaluating on it"
                )
        return self._matrix(X, Y, d)

    @abstractmethod
    def _matrix(self, X: np.ndarray, Y: np.ndarray, diff: Tuple[int, ...]) -> np.ndarray:
        ...

    def section(self, y) -> "KernelSection":
        return KernelSection(self, y)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} role={self.role}>"


class KernelSection(SmoothFunction):
    """x -> K(x, y) for fixed y, kinked at y when the kernel is."""

    def __init__(self, kernel: Kernel, y):
        self.kernel = kernel
        self.y = as_points(y, kernel.domain.dim)[0]
        self.dim = kernel.domain.dim
        self.max_order = kernel.max_order
        self.kinks = (tuple(self.y),) if kernel.kinked else ()

    def _evaluate(self, x, diff):
        return self.kernel(x, self.y.reshape(1, -1), diff)[:, 0]

    def __repr__(self):
        return f"KernelSection({self.kernel.name}, y={self.y.tolist()})"


def _pair_1d(X, Y):
    return X[:, 0][:, None], Y[:, 0][None, :]


class BrownianBridge(Kernel):
    """G(x, y) = min(x, y) - x y, the Green kernel of -d^2/dx^2 with zero end values."""

    name, role, kinked = "brownian_bridge", "G", True

    def _matrix(self, X, Y, diff):
        x, y = _pair_1d(X, Y)
        k = diff[0]
        if k == 0:
            return np.minimum(x, y) - x * y
        if k == 1:
            return (x < y).astype(float) - y + 0.0 * x
        return np.zeros((len(X), len(Y)))


class BrownianMotion(Kernel):
    """K(x, y) = min(x, y)."""

    name, role, kinked = "brownian_motion", "K", True

    def _matrix(self, X, Y, diff):
        x, y = _pair_1d(X, Y)
        k = diff[0]
        if k == 0:
            return np.minimum(x, y)
        if k == 1:
            return (x < y).astype(float)
        return np.zeros((len(X), len(Y)))


class PeriodicMin(Kernel):
    """K(x, y) = min(x, y) - x y + 1/2."""

    name, role, kinked = "periodic_min", "K", True

    def _matrix(self, X, Y, diff):
        values = BrownianBridge._matrix(self, X, Y, diff)
        return values + 0.5 if diff[0] == 0 else values


def _hyperbolic_ratio(a, b, c, odd):
    """h(a) sinh(b) / sinh(c) for a, b >= 0 and a + b <= c, h = cosh if odd else sinh.

    Written with the exponentials factored out so large arguments do not overflow.
    """
    h = 1.0 + np.exp(-2.0 * a) if odd else -np.expm1(-2.0 * a)
    return np.exp(a + b - c) * h * (-np.expm1(-2.0 * b)) / (2.0 * -np.expm1(-2.0 * c))


class SobolevGreen(Kernel):
    """Green kernel of -d^2/dx^2 + sigma^2 with zero end values (piecewise sinh form)."""

    role, kinked = "G", True

    def __init__(self, sigma: float):
        if not sigma > 0:
            raise InputError("sigma must be positive")
        self.sigma = float(sigma)
        self.name = f"sobolev_G(sigma={self.sigma:g})"

    def _matrix(self, X, Y, diff):
        s = self.sigma
        x, y = _pair_1d(X, Y)
        k = diff[0]
        if k == 0:
            lo, hi = np.minimum(x, y), np.maximum(x, y)
            return _hyperbolic_ratio(s * lo, s * (1.0 - hi), s, odd=False) / s
        x, y = np.broadcast_arrays(x, y)
        out = np.empty(x.shape)
        left = x < y
        scale = s ** (k - 1)
        out[left] = scale * _hyperbolic_ratio(s * x[left], s * (1.0 - y[left]), s, odd=k % 2 == 1)
        right = ~left
        out[right] = (-1.0) ** k * scale * _hyperbolic_ratio(
            s * (1.0 - x[right]), s * y[right], s, odd=k % 2 == 1
        )
        return out


class SobolevSpline(Kernel):
    """K(x, y) = exp(-sigma |x - y|) / (2 sigma)."""

    role, kinked = "K", True

    def __init__(self, sigma: float):
        if not sigma > 0:
            raise InputError("sigma must be positive")
        self.sigma = float(sigma)
        self.name = f"sobolev_K(sigma={self.sigma:g})"

    def _matrix(self, X, Y, diff):
        s = self.sigma
        x, y = _pair_1d(X, Y)
        k = diff[0]
        base = np.exp(-s * np.abs(x - y)) / (2.0 * s)
        if k == 0:
            return base
        sign = np.where(x > y, (-1.0) ** k, 1.0)
        return sign * s ** k * base


class AbsCounterexample(Kernel):
    """Phi(x, y) = -|x - y| / 2: a Green kernel that is not positive definite."""

    name, role, kinked = "abs_counterexample", "counterexample", True

    def _matrix(self, X, Y, diff):
        x, y = _pair_1d(X, Y)
        k = diff[0]
        if k == 0:
            return -np.abs(x - y) / 2.0
        if k == 1:
            return -np.sign(x - y) / 2.0
        return np.zeros((len(X), len(Y)))


class ThinPlateFundamental(Kernel):
    """phi(x - y) with phi(x) = |x|^2 log|x| / (8 pi) and phi(0) = 0."""

    name, role, kinked, max_order = "tps_fundamental", "fundamental", True, 2
    domain = UNIT_SQUARE

    def _matrix(self, X, Y, diff):
        d1 = X[:, 0][:, None] - Y[:, 0][None, :]
        d2 = X[:, 1][:, None] - Y[:, 1][None, :]
        r2 = d1 ** 2 + d2 ** 2
        positive = r2 > 0
        log_r2 = np.log(np.where(positive, r2, 1.0))
        c = 1.0 / (8.0 * math.pi)
        if diff == (0, 0):
            return np.where(positive, 0.5 * c * r2 * log_r2, 0.0)
        if sum(diff) == 1:
            delta = d1 if diff[0] else d2
            return np.where(positive, c * (log_r2 + 1.0) * delta, 0.0)
        safe_r2 = np.where(positive, r2, 1.0)
        if diff == (1, 1):
            return c * 2.0 * d1 * d2 / safe_r2
        delta = d1 if diff[0] == 2 else d2
        return c * (log_r2 + 1.0 + 2.0 * delta ** 2 / safe_r2)


class FiniteRankKernel(Kernel):
    """R(x, y) = sum_k a_k psi_k(x) psi_k(y); identically zero when n_a = 0."""

    role, kinked = "R", False

    def __init__(self, pair: NullSpacePair, domain: Domain, name: str = "R"):
        self.pair = pair
        self.domain = domain
        self.name = name
        orders = [f.max_order for f in pair.functions if f.max_order is not None]
        self.max_order = min(orders) if orders else None

    def _matrix(self, X, Y, diff):
        out = np.zeros((len(X), len(Y)))
        for psi, a in zip(self.pair.functions, self.pair.weights):
            out += a * np.outer(psi(X, diff), psi(Y))
        return out


class SumKernel(Kernel):
    """K = G + R."""

    role = "K"

    def __init__(self, G: Kernel, R: Kernel):
        if G.domain != R.domain:
            raise DomainError(f"Cannot add kernels on {G.domain} and {R.domain}")
        self.G, self.R = G, R
        self.domain = G.domain
        self.name = f"{G.name}+{R.name}"
        self.kinked = G.kinked or R.kinked
        orders = [k.max_order for k in (G, R) if k.max_order is not None]
        self.max_order = min(orders) if orders else None

    def _matrix(self, X, Y, diff):
        return self.G._matrix(X, Y, diff) + self.R._matrix(X, Y, diff)


def eval_kernel(k: Kernel, x, y) -> float:
    """Closed-form value at one pair of points in the closure of the domain."""
    X = k.domain.require_closure(x)
    Y = k.domain.require_closure(y)
    return float(k(X, Y)[0, 0])


def kernel_dx(k: Kernel, alpha, x, y) -> float:
    """First-argument derivative D^alpha_x K(x, y) on the smooth piece containing (x, y)."""
    X = k.domain.require_closure(x)
    Y = k.domain.require_closure(y)
    return float(k(X, Y, alpha)[0, 0])


def make_R(pair: NullSpacePair, domain: Domain = UNIT_INTERVAL) -> FiniteRankKernel:
    return FiniteRankKernel(pair, domain)


def compose_K(G: Kernel, R: Kernel) -> SumKernel:
    return SumKernel(G, R)


def verify_reproducing(space: SpaceDescriptor, k: Kernel, f: SmoothFunction, y) -> float:
    """|(K(., y), f)_H - f(y)|, with the quadrature split at y."""
    point = space.domain.require_interior(y)[0]
    section = k.section(point)
    value = hpb_inner(space, section, f, splits=[point])
    return abs(value - f.value(point))


class PDVerdict(str, Enum):
    POSITIVE_DEFINITE = "positive_definite"
    SINGULAR = "singular"
    INDEFINITE = "indefinite"


PIVOT_TOL = 1e-13


def gram(k: Kernel, X) -> np.ndarray:
    """Symmetric Gram matrix K_ij = k(x_i, x_j) on pairwise distinct points."""
    points = k.domain.require_closure(X)
    _, first, counts = np.unique(points, axis=0, return_index=True, return_counts=True)
    if (counts > 1).any():
        dup = points[first[np.argmax(counts > 1)]]
        raise InputError(f"Duplicate point {dup.tolist()} in Gram input")
    matrix = k(points, points)
    logger.debug("assembled %dx%d Gram for %s", len(points), len(points), k.name)
    return 0.5 * (matrix + matrix.T)


def cholesky_factor(matrix: np.ndarray) -> Optional[np.ndarray]:
    """Lower Cholesky factor, or None when a pivot falls below 1e-13 * max diagonal."""
    if matrix.size == 0:
        return np.zeros((0, 0))
    threshold = PIVOT_TOL * max(float(np.max(np.diag(matrix))), 0.0)
    try:
        L = linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        return None
    if not (np.diag(L) ** 2 > threshold).all():
        return None
    return L


def pd_factor(matrix: np.ndarray) -> Tuple[PDVerdict, Optional[np.ndarray]]:
    """Three-way verdict plus the Cholesky factor when positive definite."""
    L = cholesky_factor(matrix)
    if L is not None:
        return PDVerdict.POSITIVE_DEFINITE, L
    eigenvalues = np.linalg.eigvalsh(matrix)
    scale = max(float(np.max(np.abs(eigenvalues), initial=0.0)), float(np.max(np.abs(np.diag(matrix)), initial=0.0)))
    if eigenvalues.min() < -PIVOT_TOL * scale:
        return PDVerdict.INDEFINITE, None
    return PDVerdict.SINGULAR, None


def pd_check(matrix: np.ndarray) -> PDVerdict:
    """Cholesky first, eigenvalue signs to tell singular from indefinite."""
    return pd_factor(matrix)[0]
