import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modules.errors import InputError, UnsupportedFunctionError
from modules.functions import (
    Exponential,
    LinearCombination,
    Polynomial,
    Sinusoid,
    as_diff,
    as_points,
)
from modules.kernels import ThinPlateFundamental
from conftest import catalog_functions_1d, catalog_functions_2d


def test_as_points_promotes_scalars_and_single_points():
    assert as_points(0.5, 1).shape == (1, 1)
    assert as_points([0.1, 0.2, 0.3], 1).shape == (3, 1)
    assert as_points([0.5, 0.25], 2).shape == (1, 2)
    with pytest.raises(InputError):
        as_points(0.5, 2)
    with pytest.raises(InputError):
        as_points([0.1, 0.2, 0.3], 2)


def test_as_diff_rejects_wrong_length():
    assert as_diff(None, 2) == (0, 0)
    assert as_diff(3, 1) == (3,)
    with pytest.raises(InputError):
        as_diff(1, 2)
    with pytest.raises(InputError):
        as_diff((1, 0, 0), 2)


def test_polynomial_derivative():
    f = Polynomial([0.0, 0.0, 1.0])
    assert f.value(0.5, 1) == pytest.approx(1.0)
    assert f.value(0.5, 2) == pytest.approx(2.0)
    assert f.value(0.5, 3) == 0.0


def test_bivariate_polynomial_gradient():
    f = Polynomial.monomial((1, 1))
    point = [0.5, 0.25]
    assert f.value(point, (1, 0)) == pytest.approx(0.25)
    assert f.value(point, (0, 1)) == pytest.approx(0.5)
    assert f.value(point, (1, 1)) == pytest.approx(1.0)


def test_sinusoid_derivatives_cycle():
    f = Sinusoid(math.pi)
    x = np.linspace(0.0, 1.0, 7)
    assert_allclose(f(x, 1), math.pi * np.cos(math.pi * x), atol=1e-14)
    assert_allclose(f(x, 2), -math.pi ** 2 * np.sin(math.pi * x), atol=1e-13)
    assert_allclose(f(x, 4), math.pi ** 4 * np.sin(math.pi * x), atol=1e-11)


def test_zero_order_oracle_equals_evaluator():
    x = np.linspace(0.05, 0.95, 11)
    for f in catalog_functions_1d():
        assert np.array_equal(f(x), f(x, 0))


def test_mixed_partials_of_products_match_finite_differences():
    h = 1e-5
    point = np.array([0.3, 0.6])
    e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
    for f in catalog_functions_2d():
        exact = f.value(point, (1, 1))
        fd = (f.value(point + e1 + e2) - f.value(point + e1 - e2)
              - f.value(point - e1 + e2) + f.value(point - e1 - e2)) / (4 * h * h)
        assert exact == pytest.approx(fd, abs=1e-4)


def test_arithmetic_builds_linear_combinations():
    x = Polynomial([0.0, 1.0])
    s = Sinusoid(math.pi)
    pts = np.linspace(0.0, 1.0, 5)
    assert_allclose((s + x)(pts), np.sin(math.pi * pts) + pts)
    assert_allclose((s - x)(pts), np.sin(math.pi * pts) - pts)
    assert_allclose((2.0 * x + 1.0)(pts), 2.0 * pts + 1.0)
    assert_allclose((1.0 - x)(pts), 1.0 - pts)
    assert_allclose((-x)(pts, 1), -np.ones(5))
    assert isinstance(s + x, LinearCombination)


def test_product_uses_leibniz_rule():
    f = Exponential(2.0) * Sinusoid(3.0)
    x = 0.4
    # (e^{2x} sin 3x)'' = e^{2x}(4 sin 3x + 12 cos 3x - 9 sin 3x)
    expected = math.exp(2 * x) * (-5 * math.sin(3 * x) + 12 * math.cos(3 * x))
    assert f.value(x, 2) == pytest.approx(expected, rel=1e-13)


def test_linear_combination_needs_matching_dimensions():
    with pytest.raises(InputError):
        LinearCombination((Polynomial([1.0]), Polynomial.monomial((1, 0))), (1.0, 1.0))
    with pytest.raises(InputError):
        LinearCombination((), ())


def test_oracle_order_limit_is_enforced():
    section = ThinPlateFundamental().section((0.5, 0.5))
    section([0.1, 0.2], (2, 0))
    with pytest.raises(UnsupportedFunctionError):
        section([0.1, 0.2], (3, 0))
    assert section.kinks == ((0.5, 0.5),)
