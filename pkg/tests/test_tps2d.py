import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from modules.errors import DomainError, InputError
from modules.functions import Polynomial
from modules.kernels import FiniteRankKernel, PDVerdict, gram, pd_check
from modules.tps2d import (
    CorrectorProblem,
    TpsGreenKernel,
    boundary_gamma,
    fundamental_phi,
    green_tps,
    linear_basis,
    solve_corrector,
    tps_reproducing_kernel,
)

C = 1.0 / (8.0 * math.pi)

# grid points of both n = 32 and n = 64, at least 2/32 from the boundary
SYMMETRY_PAIRS = [
    ((0.25, 0.25), (0.75, 0.5)),
    ((0.375, 0.625), (0.5, 0.25)),
    ((0.25, 0.75), (0.625, 0.375)),
    ((0.5, 0.5), (0.75, 0.75)),
    ((0.125, 0.5), (0.5, 0.875)),
]


def grid_values(solution, f):
    nodes = solution.nodes
    g1, g2 = np.meshgrid(nodes, nodes, indexing="ij")
    return f(np.column_stack([g1.ravel(), g2.ravel()])).reshape(g1.shape)


def symmetry_discrepancy(n):
    return max(abs(green_tps(x, y, n) - green_tps(y, x, n)) for x, y in SYMMETRY_PAIRS)


def test_fundamental_phi():
    assert fundamental_phi((0.0, 0.0)) == 0.0
    assert fundamental_phi((1.0, 0.0)) == 0.0
    assert fundamental_phi((0.5, 0.0)) == pytest.approx(0.25 * math.log(0.5) * C, rel=1e-14)
    assert fundamental_phi((0.3, 0.4)) == pytest.approx(0.25 * math.log(0.5) * C, rel=1e-14)


def test_boundary_gamma():
    y = (0.5, 0.5)
    assert boundary_gamma(1, (0.0, 0.5), y) == pytest.approx(C * (math.log(0.25) + 1) * -0.5, rel=1e-14)
    assert boundary_gamma(1, (0.0, 0.5), y) == pytest.approx(7.68e-3, abs=1e-5)
    assert boundary_gamma(2, (0.0, 0.5), y) == 0.0
    assert boundary_gamma(3, (0.0, 0.5), y) == pytest.approx(fundamental_phi((-0.5, 0.0)), rel=1e-15)


def test_boundary_gamma_validation():
    with pytest.raises(InputError):
        boundary_gamma(4, (0.0, 0.5), (0.5, 0.5))
    with pytest.raises(DomainError):
        boundary_gamma(1, (0.2, 0.5), (0.5, 0.5))
    with pytest.raises(DomainError):
        boundary_gamma(1, (0.0, 0.5), (1.0, 0.5))


def test_zero_boundary_data_gives_zero_solution():
    solution = solve_corrector(CorrectorProblem(32, boundary=Polynomial.constant(0.0, 2)))
    assert np.max(np.abs(solution.values)) <= 1e-12


@pytest.mark.parametrize(
    "boundary",
    [
        Polynomial([[1.0, -3.0], [2.0, 0.0]]),
        Polynomial.monomial((3, 1)),
        Polynomial.monomial((1, 3), 2.0) + Polynomial([[0.5, 1.0], [0.0, 0.0]]),
    ],
    ids=["linear", "x1^3 x2", "x1 x2^3 + linear"],
)
def test_biharmonic_boundary_data_is_reproduced(boundary):
    solution = solve_corrector(CorrectorProblem(32, boundary=boundary))
    assert np.max(np.abs(solution.values - grid_values(solution, boundary))) <= 1e-8


def test_linear_boundary_data_has_exact_normal_derivative():
    solution = solve_corrector(CorrectorProblem(32, boundary=Polynomial([[1.0, -3.0], [2.0, 0.0]])))
    assert solution.normal_mismatch <= 1e-8
    assert solution.tangential_mismatch <= 1e-8


def test_fundamental_corrector_diagnostics():
    solution = solve_corrector(CorrectorProblem(32))
    assert solution.stencil_residual <= 1e-9
    assert solution.normal_mismatch < 1e-2
    assert solution.tangential_mismatch < 1e-2
    # boundary rows carry the imposed data exactly
    assert_allclose(solution.values[0], grid_values(solution, solution.problem.boundary)[0], rtol=0, atol=1e-15)


def test_source_term_enters_right_hand_side():
    # u = x1^2 x2^2 (1 - x1)^2 (1 - x2)^2 is clamped on the square
    bump = Polynomial(np.outer([0.0, 0.0, 1.0, -2.0, 1.0], [0.0, 0.0, 1.0, -2.0, 1.0]))

    def source(x):
        return bump(x, (4, 0)) + 2.0 * bump(x, (2, 2)) + bump(x, (0, 4))

    zero = Polynomial.constant(0.0, 2)
    coarse = solve_corrector(CorrectorProblem(16, boundary=zero, source=source))
    fine = solve_corrector(CorrectorProblem(32, boundary=zero, source=source))
    error_coarse = np.max(np.abs(coarse.values - grid_values(coarse, bump)))
    error_fine = np.max(np.abs(fine.values - grid_values(fine, bump)))
    assert error_fine < error_coarse
    assert error_fine <= 2e-2 * np.max(np.abs(grid_values(fine, bump)))


def test_corrector_problem_validation():
    with pytest.raises(InputError):
        CorrectorProblem(8)
    with pytest.raises(DomainError):
        CorrectorProblem(32, y=(0.05, 0.5))
    with pytest.raises(InputError):
        TpsGreenKernel(10)


def test_green_vanishes_on_boundary():
    k = TpsGreenKernel(32)
    t = np.linspace(0.0, 1.0, 9)
    boundary = np.vstack([
        np.column_stack([t, np.zeros_like(t)]),
        np.column_stack([t, np.ones_like(t)]),
        np.column_stack([np.zeros_like(t), t]),
        np.column_stack([np.ones_like(t), t]),
        [[0.3, 0.0], [1.0, 0.123]],
    ])
    values = k(boundary, np.array([[0.5, 0.5], [0.25, 0.625]]))
    assert (values == 0.0).all()


def test_green_rejects_boundary_source_point():
    with pytest.raises(DomainError):
        green_tps((0.5, 0.5), (0.0, 0.5), 32)


def test_green_at_off_grid_points_is_interpolated():
    x, y = (0.51, 0.33), (0.5, 0.5)
    value = green_tps(x, y, 32)
    left = green_tps((0.5, 0.3125), y, 32)
    assert np.isfinite(value)
    assert abs(value - left) < 1e-2


@pytest.mark.slow
def test_green_symmetry_improves_with_resolution():
    coarse = symmetry_discrepancy(32)
    fine = symmetry_discrepancy(64)
    assert fine <= 5e-3
    assert fine * 3 <= coarse


@pytest.mark.slow
def test_green_gram_is_positive_definite():
    points = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.625, 0.625)]
    assert pd_check(gram(TpsGreenKernel(64), points)) is PDVerdict.POSITIVE_DEFINITE


def test_linear_basis():
    one, s1, s2 = linear_basis()
    p = np.array([[0.25, 0.75]])
    assert one(p)[0] == 1.0
    assert s1(p)[0] == pytest.approx(-1.75)
    assert s2(p)[0] == pytest.approx(-1.25)


def test_reproducing_kernel_adds_finite_rank_part():
    K = tps_reproducing_kernel(16)
    assert isinstance(K.R, FiniteRankKernel)
    assert K.R.name == "tps_R"
    assert K.R.pair.size == 3
    X = np.array([[0.25, 0.5], [0.5, 0.5], [0.75, 0.25]])
    assert_allclose(K(X, X), K.G(X, X) + K.R(X, X), rtol=0, atol=0)
    assert np.isfinite(K(X, X)).all()
