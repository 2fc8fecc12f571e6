import math

import numpy as np
import pytest

from modules import catalog
from modules.functions import Exponential, Polynomial, Sinusoid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def bridge_space():
    return catalog.bridge()


@pytest.fixture(scope="session")
def motion_space():
    return catalog.brownian_motion()


@pytest.fixture(scope="session")
def periodic_space():
    return catalog.periodic()


@pytest.fixture(scope="session")
def sobolev_space():
    return catalog.sobolev(1.0)


@pytest.fixture(scope="session")
def thin_plate_space():
    return catalog.thin_plate()


@pytest.fixture
def x():
    return Polynomial([0.0, 1.0])


@pytest.fixture
def one():
    return Polynomial.constant(1.0)


def catalog_functions_1d():
    return [
        Sinusoid(math.pi),
        Sinusoid(2.0, phase=0.3, amplitude=1.5),
        Exponential(0.7),
        Exponential(-1.3, amplitude=2.0),
        Polynomial([1.0, -2.0, 0.5, 0.25]),
        Polynomial([0.0, 0.0, 0.0, 0.0, 1.0]),
        Sinusoid(math.pi) * Polynomial([0.0, 1.0]),
        Exponential(0.5) * Sinusoid(1.7),
        Polynomial([0.0, 1.0, -1.0]) * Exponential(1.1),
        Sinusoid(3.0) + Polynomial([2.0, 1.0]),
    ]


def catalog_functions_2d():
    x1 = Polynomial.coordinate(0, 2)
    x2 = Polynomial.coordinate(1, 2)
    return [
        Polynomial.monomial((3, 1)),
        Polynomial.monomial((2, 2)),
        Polynomial.monomial((4, 1), 0.5),
        x1 * x1 * x2 + x2,
        Sinusoid(1.3, axis=0, dim=2) * Sinusoid(0.7, axis=1, dim=2),
        Exponential(0.4, axis=0, dim=2) * Sinusoid(1.1, axis=1, dim=2),
        Exponential(-0.6, axis=1, dim=2) * Polynomial.monomial((2, 0)),
        Sinusoid(2.0, phase=0.2, axis=0, dim=2) + Polynomial.monomial((1, 3)),
        Polynomial.monomial((0, 5), 0.1),
        Exponential(0.3, axis=0, dim=2) * Exponential(0.2, axis=1, dim=2),
    ]


def _fd_derivative(g, x, alpha, h):
    """Nested central differences; orders 0, 1 and 2 per axis."""
    for axis, order in enumerate(alpha):
        if not order:
            continue
        e = np.zeros_like(x)
        e[axis] = h
        rest = list(alpha)
        rest[axis] = 0
        forward = _fd_derivative(g, x + e, rest, h)
        backward = _fd_derivative(g, x - e, rest, h)
        if order == 1:
            return (forward - backward) / (2 * h)
        if order == 2:
            return (forward - 2 * _fd_derivative(g, x, rest, h) + backward) / h ** 2
        raise ValueError("finite differences only up to order 2 per axis")
    return g(x)


def fd_adjoint_composition(P, f, x, h):
    """sum_j P_j* P_j f at x, P_j* applied by finite differences to the exact P_j f."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for j, component in enumerate(P.components):
        def Pj_f(p, j=j):
            return float(P.apply(f, p.reshape(1, -1))[j, 0])

        for term in component:
            sign = (-1.0) ** sum(term.alpha)
            rho = float(term.coefficient)
            total += sign * rho * _fd_derivative(Pj_f, x, term.alpha, h)
    return total
