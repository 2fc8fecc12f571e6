import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modules import catalog
from modules.errors import InputError
from modules.functions import Polynomial
from modules.kernels import UNIT_INTERVAL, BrownianBridge, BrownianMotion, SobolevGreen
from modules.quad import default_rule, integrate_interior
from modules.spectral import (
    apply_integral_operator,
    dirichlet_eigenpairs,
    eta_boundary_data,
    kernel_side_residual,
    mercer_compare,
    mercer_eval,
    mercer_matrix,
    mixed_eigenpairs_brownian,
    onb_check,
    operator_side_residual,
)

SAMPLES = np.linspace(0.0, 1.0, 21)


def test_dirichlet_eigenpairs_values():
    (first,) = dirichlet_eigenpairs(0.0, 1)
    assert first.index == 1
    assert first.value == pytest.approx(math.pi ** 2, rel=1e-15)
    assert first.function.value(0.5) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    third = dirichlet_eigenpairs(2.0, 3)[2]
    assert third.value == pytest.approx(9 * math.pi ** 2 + 4, rel=1e-15)


@pytest.mark.parametrize("sigma", [0.0, 2.0])
def test_dirichlet_eigenfunctions_are_normalized_with_zero_ends(sigma):
    domain = UNIT_INTERVAL
    for pair in dirichlet_eigenpairs(sigma, 6):
        e = pair.function
        norm = integrate_interior(lambda x: e(x) ** 2, domain, default_rule())
        assert norm == pytest.approx(1.0, rel=1e-13)
        assert abs(e.value(0.0)) <= 1e-15
        assert abs(e.value(1.0)) <= 1e-14


def test_mixed_eigenpairs():
    pairs = mixed_eigenpairs_brownian(4)
    assert pairs[0].kernel_eigenvalue == pytest.approx(4 / math.pi ** 2, rel=1e-15)
    assert pairs[0].kernel_eigenvalue == pytest.approx(0.405285, abs=1e-6)
    assert all(p.function.value(0.0) == 0.0 for p in pairs)
    assert pairs[0].function.value(1.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_eigenpair_counts_are_validated():
    with pytest.raises(InputError):
        dirichlet_eigenpairs(1.0, 0)
    with pytest.raises(InputError):
        dirichlet_eigenpairs(-1.0, 3)
    with pytest.raises(InputError):
        mixed_eigenpairs_brownian(0)


def test_integral_operator_on_bridge_eigenfunction():
    (pair,) = dirichlet_eigenpairs(0.0, 1)
    transformed = apply_integral_operator(BrownianBridge(), pair.function)
    assert_allclose(transformed(SAMPLES), pair.function(SAMPLES) / math.pi ** 2, atol=1e-9)


def test_integral_operator_on_zero():
    transformed = apply_integral_operator(BrownianBridge(), Polynomial.constant(0.0))
    assert not transformed(SAMPLES).any()


def test_integral_operator_on_mixed_eigenfunction():
    (pair,) = mixed_eigenpairs_brownian(1)
    transformed = apply_integral_operator(BrownianMotion(), pair.function)
    assert_allclose(transformed(SAMPLES), pair.kernel_eigenvalue * pair.function(SAMPLES), atol=1e-8)


def test_integral_operator_derivative_solves_boundary_value_problem():
    # u = I_G 1 solves -u'' = 1 with u(0) = u(1) = 0, so u = x(1 - x)/2
    u = apply_integral_operator(BrownianBridge(), Polynomial.constant(1.0))
    xs = np.linspace(0.05, 0.95, 7)
    assert_allclose(u(xs), xs * (1 - xs) / 2, atol=1e-14)
    assert_allclose(u(xs, 1), 0.5 - xs, atol=1e-14)


def test_mercer_eval_examples():
    pairs = dirichlet_eigenpairs(0.0, 3)
    assert mercer_eval(pairs, 3, 0.5, 0.5) == pytest.approx(20 / (9 * math.pi ** 2), rel=1e-14)
    assert mercer_eval(pairs, 3, 0.5, 0.5) == pytest.approx(0.225158, abs=1e-6)
    assert mercer_eval(pairs, 0, 0.5, 0.5) == 0.0


def test_mercer_truncation_is_validated():
    pairs = dirichlet_eigenpairs(0.0, 3)
    with pytest.raises(InputError):
        mercer_eval(pairs, 4, 0.5, 0.5)
    with pytest.raises(InputError):
        mercer_matrix(pairs, -1, SAMPLES, SAMPLES)


def test_mercer_partial_sums_grow_on_diagonal():
    pairs = dirichlet_eigenpairs(0.0, 40)
    previous = np.zeros(len(SAMPLES))
    for N in range(1, 41):
        diagonal = np.diag(mercer_matrix(pairs, N, SAMPLES, SAMPLES))
        assert (diagonal >= previous - 1e-15).all()
        previous = diagonal


def test_mercer_matrix_is_symmetric():
    pairs = dirichlet_eigenpairs(1.0, 25)
    matrix = mercer_matrix(pairs, 25, SAMPLES, SAMPLES)
    assert (matrix == matrix.T).all()


def test_mercer_compare_improves_with_truncation():
    pairs = dirichlet_eigenpairs(0.0, 100)
    rows = mercer_compare(pairs, BrownianBridge(), [10, 100])
    assert [N for N, _ in rows] == [10, 100]
    assert rows[1][1] < rows[0][1]
    assert rows[1][1] <= 2.0 / (math.pi ** 2 * 100) * 1.5


@pytest.mark.slow
def test_mercer_reconstructs_bridge_with_ten_thousand_terms():
    pairs = dirichlet_eigenpairs(0.0, 10_000)
    ((_, sup_error),) = mercer_compare(pairs, BrownianBridge(), [10_000])
    assert sup_error <= 1e-4


def test_onb_check_bridge(bridge_space):
    assert onb_check(bridge_space, dirichlet_eigenpairs(0.0, 5), 5) <= 1e-8
    assert onb_check(bridge_space, dirichlet_eigenpairs(0.0, 5), 1) <= 1e-9


def test_onb_check_brownian_motion(motion_space):
    assert onb_check(motion_space, mixed_eigenpairs_brownian(5), 5) <= 1e-8


def test_onb_check_sobolev_dirichlet():
    space = catalog.sobolev_dirichlet(1.0)
    assert onb_check(space, dirichlet_eigenpairs(1.0, 5), 5) <= 1e-8


@pytest.mark.parametrize("family", catalog.EIGEN_FAMILIES)
def test_eigen_transfer_residuals(family):
    space, kernel, pairs = catalog.eigen_family(family, 1.0, 10)
    for pair in pairs:
        assert kernel_side_residual(kernel, pair) <= 1e-6
        assert operator_side_residual(space.L, pair) <= 1e-6


def test_eigen_family_kernels():
    _, kernel, pairs = catalog.eigen_family("sobolev_dirichlet", 2.0, 2)
    assert isinstance(kernel, SobolevGreen)
    assert pairs[0].value == pytest.approx(math.pi ** 2 + 4.0)
    with pytest.raises(InputError, match="valid names"):
        catalog.eigen_family("periodic", 1.0, 2)


def test_mixed_boundary_data_matches_kernel_prediction(motion_space):
    for pair in mixed_eigenpairs_brownian(4):
        eta, trace = eta_boundary_data(motion_space, pair)
        assert_allclose(eta, trace, atol=1e-9)
    eta, trace = eta_boundary_data(motion_space, mixed_eigenpairs_brownian(1)[0])
    assert trace[0, 1] == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_homogeneous_boundary_data_is_zero(bridge_space):
    eta, trace = eta_boundary_data(bridge_space, dirichlet_eigenpairs(0.0, 2)[1])
    assert not eta.any()
    assert_allclose(trace, 0.0, atol=1e-14)
