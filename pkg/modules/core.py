"""
Domains, differential and boundary operators, and the operator catalog.

Operators are immutable; applying them is pure. Class membership of a vector
operator (P in P^m, B in B^m) is declared by whoever constructs it and is not
verified here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from .errors import DomainError, InputError, UnsupportedFunctionError
from .functions import SmoothFunction, as_diff, as_points

BOUNDARY_TOL = 1e-12

Coefficient = Union[float, SmoothFunction]


@dataclass(frozen=True)
class Domain:
    """An interval (a, b) or an axis-aligned rectangle (a1, b1) x (a2, b2)."""

    kind: str
    bounds: Tuple

    def __post_init__(self):
        if self.kind not in ("interval", "rectangle"):
            raise InputError(f"Unknown domain kind {self.kind!r}")
        for a, b in self.axes:
            if not a < b:
                raise InputError(f"Degenerate domain axis ({a}, {b})")

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0) -> "Domain":
        return cls("interval", (float(a), float(b)))

    @classmethod
    def rectangle(cls, first=(0.0, 1.0), second=(0.0, 1.0)) -> "Domain":
        return cls("rectangle", (tuple(map(float, first)), tuple(map(float, second))))

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2

    @property
    def axes(self) -> Tuple[Tuple[float, float], ...]:
        if self.kind == "interval":
            return (tuple(self.bounds),)
        return tuple(tuple(ax) for ax in self.bounds)

    def _margins(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary along the nearest axis (positive inside)."""
        lo = np.array([a for a, _ in self.axes])
        hi = np.array([b for _, b in self.axes])
        return np.minimum(points - lo, hi - points).min(axis=1)

    def contains(self, x, strict: bool = True) -> np.ndarray:
        margin = self._margins(as_points(x, self.dim))
        return margin > BOUNDARY_TOL if strict else margin >= -BOUNDARY_TOL

    def on_boundary(self, x) -> np.ndarray:
        margin = self._margins(as_points(x, self.dim))
        return np.abs(margin) <= BOUNDARY_TOL

    def require_interior(self, x) -> np.ndarray:
        points = as_points(x, self.dim)
        bad = ~self.contains(points, strict=True)
        if bad.any():
            raise DomainError(f"Point {points[bad][0].tolist()} is not strictly inside {self}")
        return points

    def require_boundary(self, x) -> np.ndarray:
        points = as_points(x, self.dim)
        bad = ~self.on_boundary(points)
        if bad.any():
            raise DomainError(f"Point {points[bad][0].tolist()} is not on the boundary of {self}")
        return points

    def require_closure(self, x) -> np.ndarray:
        points = as_points(x, self.dim)
        bad = ~self.contains(points, strict=False)
        if bad.any():
            raise DomainError(f"Point {points[bad][0].tolist()} lies outside {self}")
        return points

    def edges(self):
        """Counterclockwise edges as (start, end) pairs; each edge owns its start corner."""
        if self.dim != 2:
            raise DomainError("Edges are only defined for rectangles")
        (a1, b1), (a2, b2) = self.axes
        corners = [(a1, a2), (b1, a2), (b1, b2), (a1, b2)]
        return [(np.array(corners[i]), np.array(corners[(i + 1) % 4])) for i in range(4)]

    def boundary_samples(self, per_edge: int = 4) -> np.ndarray:
        """Endpoints (a then b) in 1-D; per_edge points per edge, counterclockwise, in 2-D."""
        if self.dim == 1:
            a, b = self.bounds
            return np.array([[a], [b]])
        t = np.arange(per_edge) / per_edge
        return np.vstack([start + t[:, None] * (end - start) for start, end in self.edges()])

    def interior_samples(self, count: int = 9) -> np.ndarray:
        """Equispaced interior points: count in 1-D, a count x count grid in 2-D."""
        grids = [np.linspace(a, b, count + 2)[1:-1] for a, b in self.axes]
        if self.dim == 1:
            return grids[0].reshape(-1, 1)
        g1, g2 = np.meshgrid(*grids, indexing="ij")
        return np.column_stack([g1.ravel(), g2.ravel()])

    def outward_normals(self, x) -> np.ndarray:
        """Outward unit normals at boundary points; corners use the edge that owns them."""
        points = self.require_boundary(x)
        if self.dim == 1:
            a, _ = self.bounds
            return np.where(np.abs(points - a) <= BOUNDARY_TOL, -1.0, 1.0)
        (a1, b1), (a2, b2) = self.axes
        normals = np.zeros_like(points)
        x1, x2 = points[:, 0], points[:, 1]
        close = lambda u, v: np.abs(u - v) <= BOUNDARY_TOL
        bottom = close(x2, a2) & ~close(x1, b1)
        right = close(x1, b1) & ~close(x2, b2)
        top = close(x2, b2) & ~close(x1, a1)
        left = close(x1, a1) & ~close(x2, a2)
        normals[bottom] = (0.0, -1.0)
        normals[right] = (1.0, 0.0)
        normals[top] = (0.0, 1.0)
        normals[left] = (-1.0, 0.0)
        return normals


def _coefficient_values(coefficient: Coefficient, points: np.ndarray) -> np.ndarray:
    if isinstance(coefficient, SmoothFunction):
        return coefficient(points)
    return np.full(len(points), float(coefficient))


def _is_zero(coefficient: Coefficient) -> bool:
    return not isinstance(coefficient, SmoothFunction) and float(coefficient) == 0.0


@dataclass(frozen=True)
class DiffTerm:
    """rho_alpha * D^alpha."""

    alpha: Tuple[int, ...]
    coefficient: Coefficient = 1.0


@dataclass(frozen=True)
class VectorDiffOperator:
    """P = (P_1, ..., P_np), each P_j a sum of DiffTerms."""

    domain: Domain
    components: Tuple[Tuple[DiffTerm, ...], ...]
    in_class: bool = True

    def __post_init__(self):
        for component in self.components:
            for term in component:
                as_diff(term.alpha, self.domain.dim)

    @property
    def order(self) -> int:
        return max(
            (sum(t.alpha) for c in self.components for t in c if not _is_zero(t.coefficient)),
            default=0,
        )

    def __len__(self):
        return len(self.components)

    def apply(self, f: SmoothFunction, points: np.ndarray) -> np.ndarray:
        """(np, N) array of P_j f at the given points, without domain checks."""
        out = np.zeros((len(self.components), len(points)))
        for j, component in enumerate(self.components):
            for term in component:
                out[j] += _coefficient_values(term.coefficient, points) * f(points, term.alpha)
        return out


@dataclass(frozen=True)
class BoundaryTerm:
    """b_beta * D^beta restricted to the boundary."""

    beta: Tuple[int, ...]
    coefficient: Coefficient = 1.0


@dataclass(frozen=True)
class VectorBoundaryOperator:
    """B = (B_1, ..., B_nb); derivatives are one-sided limits from inside."""

    domain: Domain
    components: Tuple[Tuple[BoundaryTerm, ...], ...]
    in_class: bool = True

    def __post_init__(self):
        for component in self.components:
            for term in component:
                as_diff(term.beta, self.domain.dim)

    @property
    def order(self) -> int:
        return max(
            (sum(t.beta) for c in self.components for t in c if not _is_zero(t.coefficient)),
            default=0,
        )

    def __len__(self):
        return len(self.components)

    def apply(self, f: SmoothFunction, points: np.ndarray) -> np.ndarray:
        """(nb, N) array of B_j f at boundary points, without domain checks."""
        out = np.zeros((len(self.components), len(points)))
        for j, component in enumerate(self.components):
            for term in component:
                out[j] += _coefficient_values(term.coefficient, points) * f(points, term.beta)
        return out


CATALOG_TAGS = ("neg_second_derivative", "neg_second_plus_sigma2", "biharmonic_2d")


@dataclass(frozen=True)
class CatalogOperatorL:
    """L = sum_j P_j* P_j for the operator systems the library knows in closed form."""

    tag: str
    sigma: float = 0.0

    def __post_init__(self):
        if self.tag not in CATALOG_TAGS:
            raise UnsupportedFunctionError(
                f"Operator {self.tag!r} is not in the catalog {CATALOG_TAGS}"
            )
        if self.tag == "neg_second_plus_sigma2" and not self.sigma > 0:
            raise InputError("sigma must be positive")

    @property
    def dim(self) -> int:
        return 2 if self.tag == "biharmonic_2d" else 1

    @property
    def order(self) -> int:
        return 4 if self.tag == "biharmonic_2d" else 2

    def apply(self, f: SmoothFunction, points: np.ndarray) -> np.ndarray:
        if self.tag == "neg_second_derivative":
            return -f(points, 2)
        if self.tag == "neg_second_plus_sigma2":
            return -f(points, 2) + self.sigma ** 2 * f(points)
        return f(points, (4, 0)) + 2.0 * f(points, (2, 2)) + f(points, (0, 4))


@dataclass(frozen=True)
class OperatorSystem:
    """A domain with P, B and the induced catalog operator L."""

    name: str
    domain: Domain
    P: VectorDiffOperator
    B: VectorBoundaryOperator
    L: CatalogOperatorL
    null_basis: Tuple[SmoothFunction, ...] = field(default=())

    def __post_init__(self):
        if self.P.domain != self.domain or self.B.domain != self.domain:
            raise DomainError("P, B and the system must share one domain")
        if self.L.dim != self.domain.dim:
            raise DomainError(f"L={self.L.tag} does not act on {self.domain.dim}-D functions")
        if self.B.order > self.P.order - 1:
            raise InputError("Boundary operator order must not exceed order(P) - 1")


def apply_vector_diff(P: VectorDiffOperator, f: SmoothFunction, x) -> np.ndarray:
    """Component j is sum_alpha rho_alpha(x) (D^alpha f)(x) at an interior point x."""
    points = P.domain.require_interior(x)
    if len(points) != 1:
        raise InputError("apply_vector_diff takes a single point")
    return P.apply(f, points)[:, 0]


def apply_vector_boundary(B: VectorBoundaryOperator, f: SmoothFunction, x) -> np.ndarray:
    """Component j is sum_beta b_beta(x) (D^beta f)(x) at a boundary point x."""
    points = B.domain.require_boundary(x)
    if len(points) != 1:
        raise InputError("apply_vector_boundary takes a single point")
    return B.apply(f, points)[:, 0]


def apply_L(L: CatalogOperatorL, f: SmoothFunction, x) -> float:
    """(Lf)(x) by the catalog closed form."""
    if not isinstance(L, CatalogOperatorL):
        raise UnsupportedFunctionError("Only catalog operators can be applied")
    points = as_points(x, L.dim)
    if len(points) != 1:
        raise InputError("apply_L takes a single point")
    return float(L.apply(f, points)[0])
