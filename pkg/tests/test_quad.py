import math

import numpy as np
import pytest

from modules.core import Domain
from modules.errors import DomainError, InputError, IntegrandError
from modules.quad import QuadratureRule, gauss_legendre, integrate_boundary, integrate_interior

UNIT = Domain.interval(0.0, 1.0)
SQUARE = Domain.rectangle((0.0, 1.0), (0.0, 1.0))


def smooth(x):
    return np.exp(x[:, 0]) * np.sin(3.0 * x[:, 0])


def test_gauss_legendre_is_cached_and_read_only():
    x, w = gauss_legendre(8)
    assert gauss_legendre(8)[0] is x
    with pytest.raises(ValueError):
        w[0] = 1.0


def test_rule_validates_sizes():
    with pytest.raises(InputError):
        QuadratureRule(nodes=0)
    with pytest.raises(InputError):
        QuadratureRule(panels=0)


def test_weights_on_unit_interval():
    rule = QuadratureRule()
    x, w = rule.axis_rule(0.0, 1.0)
    assert len(x) == 32 * 4
    assert (w > 0).all()
    assert abs(w.sum() - 1.0) <= 1e-14
    edges = np.linspace(0.0, 1.0, 5)
    for k in range(4):
        panel = x[32 * k:32 * (k + 1)]
        assert (panel > edges[k]).all() and (panel < edges[k + 1]).all()


def test_splits_break_panels():
    rule = QuadratureRule(nodes=4, panels=1).with_splits([0.25, 0.75])
    assert rule.axis_splits(0) == (0.25, 0.75)
    x, _ = rule.axis_rule(0.0, 1.0)
    assert len(x) == 12
    assert not np.isin(x, [0.25, 0.75]).any()


def test_mixed_split_specifications():
    rule = QuadratureRule().with_splits([0.5, (0.25,), np.array([0.75])])
    assert rule.axis_splits(0) == (0.25, 0.5, 0.75)


def test_interior_polynomial():
    assert integrate_interior(lambda x: x[:, 0] ** 2, UNIT, QuadratureRule()) == pytest.approx(1 / 3, abs=1e-14)


def test_interior_kinked_with_split():
    rule = QuadratureRule().with_splits([0.5])
    value = integrate_interior(lambda x: np.abs(x[:, 0] - 0.5), UNIT, rule)
    assert value == pytest.approx(0.25, abs=1e-14)


def test_interior_separable_2d():
    value = integrate_interior(lambda x: x[:, 0] * x[:, 1], SQUARE, QuadratureRule())
    assert value == pytest.approx(0.25, abs=1e-13)


def test_boundary_1d_is_endpoint_sum():
    assert integrate_boundary(lambda x: x[:, 0], UNIT, QuadratureRule()) == 1.0


def test_boundary_2d_perimeter_and_moment():
    rule = QuadratureRule()
    assert integrate_boundary(lambda x: np.ones(len(x)), SQUARE, rule) == pytest.approx(4.0, abs=1e-13)
    assert integrate_boundary(lambda x: x[:, 0], SQUARE, rule) == pytest.approx(2.0, abs=1e-13)


def test_boundary_integral_of_function_zero_on_boundary_is_exact():
    bubble_1d = lambda x: x[:, 0] * (1.0 - x[:, 0])
    assert integrate_boundary(bubble_1d, UNIT, QuadratureRule()) == 0.0
    bubble_2d = lambda x: x[:, 0] * (1.0 - x[:, 0]) * x[:, 1] * (1.0 - x[:, 1])
    assert integrate_boundary(bubble_2d, SQUARE, QuadratureRule()) == 0.0


def test_doubling_panels_reaches_plateau():
    coarse = integrate_interior(smooth, UNIT, QuadratureRule(panels=4))
    fine = integrate_interior(smooth, UNIT, QuadratureRule(panels=8))
    assert abs(coarse - fine) <= 1e-12


def test_artificial_split_does_not_change_smooth_integral():
    plain = integrate_interior(smooth, UNIT, QuadratureRule())
    split = integrate_interior(smooth, UNIT, QuadratureRule().with_splits([0.3141]))
    assert abs(plain - split) <= 1e-13


def test_non_finite_integrand_reports_node():
    def blows_up(x):
        out = np.ones(len(x))
        out[7] = math.inf
        return out

    with pytest.raises(IntegrandError) as excinfo:
        integrate_interior(blows_up, UNIT, QuadratureRule())
    assert len(excinfo.value.node) == 1


def test_split_outside_domain_is_rejected():
    with pytest.raises(DomainError):
        integrate_interior(smooth, UNIT, QuadratureRule().with_splits([1.5]))


def test_nonunit_interval():
    domain = Domain.interval(-1.0, 2.0)
    assert integrate_interior(lambda x: x[:, 0], domain, QuadratureRule()) == pytest.approx(1.5, abs=1e-14)
