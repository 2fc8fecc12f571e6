"""
Thin-plate example on the unit square.

G(x, y) = phi(x - y) - phi^y(x), where phi is the fundamental solution of the
bilaplacian and the corrector phi^y is biharmonic with the clamped boundary data
of x -> phi(x - y). The corrector is computed with the 13-point finite-difference
stencil; ghost nodes outside the square are eliminated with the normal-derivative
condition.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as splinalg
from scipy.interpolate import RegularGridInterpolator

from config.settings import get_worker_count
from .errors import DomainError, InputError, SolverError
from .functions import Polynomial, SmoothFunction, as_points
from .hilbert import NullSpacePair, orthonormalize
from .kernels import UNIT_SQUARE, FiniteRankKernel, Kernel, SumKernel, ThinPlateFundamental

logger = logging.getLogger(__name__)

FUNDAMENTAL = ThinPlateFundamental()
MIN_RESOLUTION = 16
GRID_TOL = 1e-9

# (di, dj, weight) of h^4 * bilaplacian
STENCIL = (
    [(0, 0, 20.0)]
    + [(di, dj, -8.0) for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1))]
    + [(di, dj, 2.0) for di, dj in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
    + [(di, dj, 1.0) for di, dj in ((2, 0), (-2, 0), (0, 2), (0, -2))]
)


def fundamental_phi(x) -> float:
    """phi(x) = |x|^2 log|x| / (8 pi), phi(0) = 0."""
    return float(FUNDAMENTAL(as_points(x, 2), np.zeros((1, 2)))[0, 0])


def boundary_gamma(j: int, x, y) -> float:
    """Gamma_1, Gamma_2: partial derivatives of phi(. - y) at x; Gamma_3: phi(x - y)."""
    if j not in (1, 2, 3):
        raise InputError(f"Gamma index must be 1, 2 or 3, got {j}")
    X = UNIT_SQUARE.require_boundary(x)
    Y = UNIT_SQUARE.require_interior(y)
    diff = {1: (1, 0), 2: (0, 1), 3: (0, 0)}[j]
    return float(FUNDAMENTAL(X, Y, diff)[0, 0])


@dataclass(frozen=True)
class CorrectorProblem:
    """
    Clamped biharmonic problem on an n x n grid of the unit square.

    The boundary value and outward normal derivative are taken from ``boundary``,
    which defaults to x -> phi(x - y). ``source`` is an optional right-hand side.
    """

    n: int
    y: Tuple[float, float] = (0.5, 0.5)
    boundary: Optional[SmoothFunction] = None
    source: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.n < MIN_RESOLUTION:
            raise InputError(f"Grid resolution must be at least {MIN_RESOLUTION}, got {self.n}")
        y = tuple(float(c) for c in self.y)
        object.__setattr__(self, "y", y)
        margin = min(min(c, 1.0 - c) for c in y)
        if margin < 2.0 * self.h - GRID_TOL:
            raise DomainError(f"Source point {y} must be at least 2h = {2 * self.h:g} from the boundary")
        if self.boundary is None:
            object.__setattr__(self, "boundary", FUNDAMENTAL.section(y))

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h


@dataclass(frozen=True)
class CorrectorSolution:
    problem: CorrectorProblem
    values: np.ndarray
    stencil_residual: float
    normal_mismatch: float
    tangential_mismatch: float
    _interpolator: RegularGridInterpolator = field(repr=False, compare=False)

    @property
    def nodes(self) -> np.ndarray:
        return self.problem.nodes

    def at(self, x) -> np.ndarray:
        """Grid value at nodes, the imposed boundary value on the boundary, bilinear elsewhere."""
        points = UNIT_SQUARE.require_closure(x)
        out = self._interpolator(points)
        scaled = points * self.problem.n
        on_grid = np.all(np.abs(scaled - np.round(scaled)) <= GRID_TOL, axis=1)
        idx = np.round(scaled[on_grid]).astype(int)
        out[on_grid] = self.values[idx[:, 0], idx[:, 1]]
        boundary = UNIT_SQUARE.on_boundary(points)
        if boundary.any():
            out[boundary] = self.problem.boundary(points[boundary])
        return out


def _ghost_terms(p: int, q: int, n: int):
    """Express ghost node (p, q) through (boundary node, first inner, second inner, normal).

    u_ghost = (-3 u_b + 6 u_1 - u_2 + 6 h g1) / 2, g1 the outward normal derivative.
    """
    if p == -1:
        return (0, q), (1, q), (2, q), (-1.0, 0.0)
    if p == n + 1:
        return (n, q), (n - 1, q), (n - 2, q), (1.0, 0.0)
    if q == -1:
        return (p, 0), (p, 1), (p, 2), (0.0, -1.0)
    return (p, n), (p, n - 1), (p, n - 2), (0.0, 1.0)


def solve_corrector(prob: CorrectorProblem) -> CorrectorSolution:
    """Biharmonic solve with the clamped boundary data of ``prob.boundary``."""
    n, h = prob.n, prob.h
    nodes = prob.nodes
    m = n - 1
    g = prob.boundary

    def index(i, j):
        return (i - 1) * m + (j - 1)

    def interior(i, j):
        return 1 <= i <= m and 1 <= j <= m

    def point(i, j):
        return np.array([[nodes[i], nodes[j]]])

    g0_cache = {}

    def g0(i, j):
        if (i, j) not in g0_cache:
            g0_cache[(i, j)] = float(g(point(i, j))[0])
        return g0_cache[(i, j)]

    def g1(i, j, normal):
        grad = (float(g(point(i, j), (1, 0))[0]), float(g(point(i, j), (0, 1))[0]))
        return normal[0] * grad[0] + normal[1] * grad[1]

    rows, cols, data = [], [], []
    rhs = np.zeros(m * m)

    def add(row, i, j, weight):
        if interior(i, j):
            rows.append(row)
            cols.append(index(i, j))
            data.append(weight)
        else:
            rhs[row] -= weight * g0(i, j)

    for i in range(1, n):
        for j in range(1, n):
            row = index(i, j)
            if prob.source is not None:
                rhs[row] += h ** 4 * float(np.asarray(prob.source(point(i, j))).reshape(-1)[0])
            for di, dj, w in STENCIL:
                p, q = i + di, j + dj
                if -1 < p < n + 1 and -1 < q < n + 1:
                    add(row, p, q, w)
                    continue
                b, first, second, normal = _ghost_terms(p, q, n)
                add(row, *b, -1.5 * w)
                add(row, *first, 3.0 * w)
                add(row, *second, -0.5 * w)
                rhs[row] -= 3.0 * h * w * g1(*b, normal)

    A = sparse.coo_matrix((data, (rows, cols)), shape=(m * m, m * m)).tocsc()
    with warnings.catch_warnings():
        warnings.simplefilter("error", splinalg.MatrixRankWarning)
        try:
            u = splinalg.spsolve(A, rhs)
        except (RuntimeError, splinalg.MatrixRankWarning) as exc:
            raise SolverError(f"Corrector system is singular: {exc}") from exc
    if not np.all(np.isfinite(u)):
        raise SolverError("Corrector solve produced non-finite values")

    values = np.empty((n + 1, n + 1))
    values[1:n, 1:n] = u.reshape(m, m)
    for k in range(n + 1):
        for i, j in ((0, k), (n, k), (k, 0), (k, n)):
            values[i, j] = g0(i, j)

    stencil_residual = float(np.max(np.abs(A @ u - rhs)))
    normal_mismatch, tangential_mismatch = _boundary_diagnostics(values, g, nodes, h)
    logger.debug(
        "corrector n=%d y=%s: stencil residual %.2e, normal mismatch %.2e",
        n, prob.y, stencil_residual, normal_mismatch,
    )
    interpolator = RegularGridInterpolator((nodes, nodes), values, method="linear")
    return CorrectorSolution(prob, values, stencil_residual, normal_mismatch,
                             tangential_mismatch, interpolator)


def _boundary_diagnostics(values, g, nodes, h):
    """Second-order one-sided normal derivative and centered tangential derivative errors."""
    n = len(nodes) - 1
    inner = np.arange(1, n)
    edges = (
        # (boundary line, first inner, second inner, axis points, normal sign along axis 0/1)
        (values[0, inner], values[1, inner], values[2, inner], (0.0, None), (-1.0, 0.0)),
        (values[n, inner], values[n - 1, inner], values[n - 2, inner], (1.0, None), (1.0, 0.0)),
        (values[inner, 0], values[inner, 1], values[inner, 2], (None, 0.0), (0.0, -1.0)),
        (values[inner, n], values[inner, n - 1], values[inner, n - 2], (None, 1.0), (0.0, 1.0)),
    )
    normal_err = tangential_err = 0.0
    for u0, u1, u2, fixed, normal in edges:
        if fixed[0] is not None:
            pts = np.column_stack([np.full(n - 1, fixed[0]), nodes[inner]])
            tangent = (0, 1)
            line = values[0 if fixed[0] == 0.0 else n, :]
        else:
            pts = np.column_stack([nodes[inner], np.full(n - 1, fixed[1])])
            tangent = (1, 0)
            line = values[:, 0 if fixed[1] == 0.0 else n]
        exact_normal = normal[0] * g(pts, (1, 0)) + normal[1] * g(pts, (0, 1))
        # inward one-sided difference, negated for the outward normal
        estimate = -(-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h)
        normal_err = max(normal_err, float(np.max(np.abs(estimate - exact_normal))))
        centered = (line[2:] - line[:-2]) / (2.0 * h)
        tangential_err = max(tangential_err, float(np.max(np.abs(centered - g(pts, tangent)))))
    return normal_err, tangential_err


@lru_cache(maxsize=256)
def corrector_for(y: Tuple[float, float], n: int) -> CorrectorSolution:
    return solve_corrector(CorrectorProblem(n, y))


class TpsGreenKernel(Kernel):
    """G(x, y) = phi(x - y) - phi^y(x) with the corrector on an n x n grid."""

    role, kinked, max_order = "G", True, 0
    domain = UNIT_SQUARE

    def __init__(self, n: int = 64):
        if n < MIN_RESOLUTION:
            raise InputError(f"Grid resolution must be at least {MIN_RESOLUTION}, got {n}")
        self.n = n
        self.name = f"tps_G(n={n})"

    def correctors(self, Y: np.ndarray):
        keys = [tuple(float(c) for c in y) for y in Y]
        unique = list(dict.fromkeys(keys))
        workers = min(get_worker_count(), len(unique)) or 1
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = dict(zip(unique, pool.map(lambda y: corrector_for(y, self.n), unique)))
        return [solved[key] for key in keys]

    def _matrix(self, X, Y, diff):
        out = FUNDAMENTAL(X, Y)
        for col, solution in enumerate(self.correctors(Y)):
            out[:, col] -= solution.at(X)
        return out


def green_tps(x, y, resolution: int = 64) -> float:
    """phi(x - y) - phi^y(x); x off the grid is interpolated bilinearly."""
    X = UNIT_SQUARE.require_closure(x)
    Y = UNIT_SQUARE.require_interior(y)
    return float(TpsGreenKernel(resolution)(X, Y)[0, 0])


def linear_basis():
    """{1, x1 - 2, x2 - 2}."""
    one = Polynomial.constant(1.0, 2)
    return [one, Polynomial.coordinate(0, 2) - 2.0, Polynomial.coordinate(1, 2) - 2.0]


def reference_linear_basis():
    """{1/2, sqrt(3/29)(x1 - 2), sqrt(3/29)(x2 - 2)}, the commonly quoted normalization."""
    scale = math.sqrt(3.0 / 29.0)
    one, s1, s2 = linear_basis()
    return [0.5 * one, scale * s1, scale * s2]


def tps_reproducing_kernel(n: int = 64, B=None) -> SumKernel:
    """K = G + R with R built from the B-orthonormalized linear basis and unit weights."""
    if B is None:
        from .catalog import thin_plate_system

        B = thin_plate_system().B
    psis = orthonormalize(linear_basis(), B)
    R = FiniteRankKernel(NullSpacePair(psis, (1.0,) * len(psis)), UNIT_SQUARE, name="tps_R")
    return SumKernel(TpsGreenKernel(n), R)
