"""
Composite Gauss-Legendre quadrature on intervals, rectangles and their boundaries.

Every smooth piece between split points is cut into equal panels and each panel
gets the same Gauss-Legendre rule. Integrands take an (N, D) array of nodes and
return (N,) values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable, Tuple

import numpy as np

from config.settings import get_default_quadrature
from .core import Domain
from .errors import DomainError, InputError, IntegrandError
from .functions import as_points

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def gauss_legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    """Composite rule: ``nodes`` per panel, ``panels`` per smooth piece, per-axis splits."""

    nodes: int = 32
    panels: int = 4
    splits: Tuple[Tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.nodes < 1 or self.panels < 1:
            raise InputError("Quadrature nodes and panels must be positive")

    def axis_splits(self, axis: int) -> Tuple[float, ...]:
        return self.splits[axis] if axis < len(self.splits) else ()

    def with_splits(self, points: Iterable, dim: int = 1) -> "QuadratureRule":
        """Add split points; each point splits every axis at its coordinate."""
        pts = list(points)
        if not pts:
            return self
        coords = as_points(np.array([np.atleast_1d(np.asarray(p, dtype=float)) for p in pts]), dim)
        merged = []
        for axis in range(dim):
            existing = set(self.axis_splits(axis))
            existing.update(float(c) for c in coords[:, axis])
            merged.append(tuple(sorted(existing)))
        return replace(self, splits=tuple(merged))

    def axis_rule(self, a: float, b: float, axis: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [a, b] honoring the splits that fall strictly inside."""
        inner = [s for s in self.axis_splits(axis) if a < s < b]
        breaks = [a, *inner, b]
        ref_x, ref_w = gauss_legendre(self.nodes)
        xs, ws = [], []
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            edges = np.linspace(lo, hi, self.panels + 1)
            for p_lo, p_hi in zip(edges[:-1], edges[1:]):
                half = 0.5 * (p_hi - p_lo)
                xs.append(p_lo + half * (ref_x + 1.0))
                ws.append(half * ref_w)
        return np.concatenate(xs), np.concatenate(ws)


def default_rule() -> QuadratureRule:
    nodes, panels = get_default_quadrature()
    return QuadratureRule(nodes=nodes, panels=panels)


def _reduce(integrand: Integrand, points: np.ndarray, weights: np.ndarray) -> float:
    values = np.asarray(integrand(points), dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        idx = int(np.argmax(bad))
        raise IntegrandError(points[idx], float(values[idx]))
    # fsum is correctly rounded, so the result does not depend on summation order
    return math.fsum(weights * values)


def integrate_interior(f: Integrand, domain: Domain, rule: QuadratureRule) -> float:
    """Composite quadrature of the integral of f over the domain (tensor rule in 2-D)."""
    for axis, (a, b) in enumerate(domain.axes):
        outside = [s for s in rule.axis_splits(axis) if not a <= s <= b]
        if outside:
            raise DomainError(f"Split points {outside} lie outside ({a}, {b})")
    per_axis = [rule.axis_rule(a, b, axis) for axis, (a, b) in enumerate(domain.axes)]
    if domain.dim == 1:
        x, w = per_axis[0]
        points, weights = x.reshape(-1, 1), w
    else:
        (x1, w1), (x2, w2) = per_axis
        g1, g2 = np.meshgrid(x1, x2, indexing="ij")
        points = np.column_stack([g1.ravel(), g2.ravel()])
        weights = np.outer(w1, w2).ravel()
    logger.debug("interior quadrature on %s with %d nodes", domain, len(weights))
    return _reduce(f, points, weights)


def integrate_boundary(f: Integrand, domain: Domain, rule: QuadratureRule) -> float:
    """Boundary integral: f(a) + f(b) in 1-D, edgewise quadrature of f dS in 2-D."""
    if domain.dim == 1:
        a, b = domain.bounds
        return _reduce(f, np.array([[a], [b]]), np.ones(2))
    points, weights = [], []
    for start, end in domain.edges():
        axis = 0 if start[1] == end[1] else 1
        lo, hi = sorted((start[axis], end[axis]))
        t, w = rule.axis_rule(lo, hi, axis)
        edge = np.tile(start, (len(t), 1))
        edge[:, axis] = t
        points.append(edge)
        weights.append(w)
    return _reduce(f, np.vstack(points), np.concatenate(weights))
