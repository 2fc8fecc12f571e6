"""
Closed-form eigenpairs of L under boundary conditions and the kernel side of them:
the integral operator I_K, truncated Mercer expansions and the transfer residuals
between the operator and kernel eigenproblems.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core import CatalogOperatorL
from .errors import InputError
from .functions import LinearCombination, SmoothFunction, Sinusoid, as_points
from .hilbert import SpaceDescriptor, hpb_inner
from .kernels import Kernel
from .quad import QuadratureRule, default_rule, integrate_interior

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class EigenPair:
    """L e = mu e with the boundary conditions; the kernel eigenvalue is 1 / mu."""

    index: int
    value: float
    function: SmoothFunction

    @property
    def kernel_eigenvalue(self) -> float:
        return 1.0 / self.value


def _require_count(n: int):
    if n < 1:
        raise InputError(f"Need at least one eigenpair, got {n}")


def dirichlet_eigenpairs(sigma: float, n: int) -> List[EigenPair]:
    """mu_p = p^2 pi^2 + sigma^2, e_p = sqrt(2) sin(p pi x) on (0, 1)."""
    _require_count(n)
    if sigma < 0:
        raise InputError("sigma must be non-negative")
    return [
        EigenPair(p, (p * math.pi) ** 2 + sigma ** 2, Sinusoid(p * math.pi, amplitude=SQRT2))
        for p in range(1, n + 1)
    ]


def mixed_eigenpairs_brownian(n: int) -> List[EigenPair]:
    """Eigenpairs of min(x, y): e_p = sqrt(2) sin((p - 1/2) pi x), mu_p = ((p - 1/2) pi)^2."""
    _require_count(n)
    pairs = []
    for p in range(1, n + 1):
        w = (p - 0.5) * math.pi
        pairs.append(EigenPair(p, w * w, Sinusoid(w, amplitude=SQRT2)))
    return pairs


class IntegralTransform(SmoothFunction):
    """y -> integral over the domain of K(y, x) f(x) dx, split at y for kinked kernels.

    Derivatives are taken under the integral with the first-argument oracle, so
    only first derivatives are available for kinked kernels.
    """

    def __init__(self, kernel: Kernel, f: SmoothFunction, rule: QuadratureRule):
        self.kernel = kernel
        self.f = f
        self.rule = rule.with_splits(f.kinks, kernel.domain.dim)
        self.dim = kernel.domain.dim
        self.max_order = 1 if kernel.kinked else kernel.max_order

    def _evaluate(self, x, diff):
        out = np.empty(len(x))
        domain = self.kernel.domain
        for i, y in enumerate(x):
            row = y.reshape(1, -1)
            rule = self.rule.with_splits([y], self.dim) if self.kernel.kinked else self.rule

            def integrand(nodes):
                return self.kernel(row, nodes, diff)[0] * self.f(nodes)

            out[i] = integrate_interior(integrand, domain, rule)
        return out

    def __repr__(self):
        return f"IntegralTransform({self.kernel.name}, {self.f!r})"


def apply_integral_operator(k: Kernel, f: SmoothFunction,
                            rule: Optional[QuadratureRule] = None) -> IntegralTransform:
    return IntegralTransform(k, f, rule or default_rule())


def _check_truncation(pairs: Sequence[EigenPair], N: int):
    if N < 0 or N > len(pairs):
        raise InputError(f"Truncation N={N} outside 0..{len(pairs)}")


def mercer_matrix(pairs: Sequence[EigenPair], N: int, xs, ys) -> np.ndarray:
    """sum_{p <= N} e_p(x_i) e_p(y_j) / mu_p, accumulated from the smallest term up."""
    _check_truncation(pairs, N)
    X, Y = as_points(xs, 1), as_points(ys, 1)
    total = np.zeros((len(X), len(Y)))
    for pair in reversed(pairs[:N]):
        e = pair.function
        total += np.outer(e(X), e(Y)) / pair.value
    logger.debug("Mercer sum with %d terms on %dx%d points", N, len(X), len(Y))
    return total


def mercer_eval(pairs: Sequence[EigenPair], N: int, x, y) -> float:
    return float(mercer_matrix(pairs, N, x, y)[0, 0])


def mercer_compare(pairs: Sequence[EigenPair], kernel: Kernel, truncations: Sequence[int],
                   grid_size: int = 51) -> List[tuple]:
    """(N, sup over a grid x grid of |Mercer sum - closed form|) for each N."""
    grid = np.linspace(0.0, 1.0, grid_size)
    exact = kernel(grid, grid)
    return [(N, float(np.max(np.abs(mercer_matrix(pairs, N, grid, grid) - exact))))
            for N in truncations]


def onb_check(space: SpaceDescriptor, pairs: Sequence[EigenPair], N: int) -> float:
    """max_{p,q <= N} |(sqrt(lam_p) e_p, sqrt(lam_q) e_q)_H - delta_pq|."""
    _check_truncation(pairs, N)
    scaled = [LinearCombination((p.function,), (math.sqrt(p.kernel_eigenvalue),))
              for p in pairs[:N]]
    worst = 0.0
    for i in range(N):
        for j in range(i, N):
            value = hpb_inner(space, scaled[i], scaled[j])
            worst = max(worst, abs(value - (1.0 if i == j else 0.0)))
    return worst


def _sample_grid(count: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, count).reshape(-1, 1)


def kernel_side_residual(k: Kernel, pair: EigenPair, rule: Optional[QuadratureRule] = None,
                         samples: int = 21) -> float:
    """sup_y |I_K e_p(y) - e_p(y) / mu_p| on equispaced points of [0, 1]."""
    ys = _sample_grid(samples)
    transformed = apply_integral_operator(k, pair.function, rule)(ys)
    return float(np.max(np.abs(transformed - pair.kernel_eigenvalue * pair.function(ys))))


def operator_side_residual(L: CatalogOperatorL, pair: EigenPair, samples: int = 21) -> float:
    """sup_x |L e_p(x) - mu_p e_p(x)| on interior points."""
    xs = _sample_grid(samples + 2)[1:-1]
    return float(np.max(np.abs(L.apply(pair.function, xs) - pair.value * pair.function(xs))))


def eta_boundary_data(space: SpaceDescriptor, pair: EigenPair,
                      rule: Optional[QuadratureRule] = None) -> tuple:
    """
    Boundary data of an eigenfunction as predicted from the kernel side.

    eta_j(x) = mu_p (Gamma_j(x, .), e_p) with Gamma_j(x, y) = sum_k a_k (B_j psi_k)(x) psi_k(y),
    returned together with the actual traces B_j e_p(x) on the boundary samples.
    Both arrays have shape (n_b, samples); they agree for eigenpairs of K = G + R.
    """
    rule = rule or space.rule
    samples = space.domain.boundary_samples()
    e = pair.function
    trace = space.B.apply(e, samples)
    eta = np.zeros_like(trace)
    for psi, a in zip(space.pair.functions, space.pair.weights):
        moment = integrate_interior(lambda x: psi(x) * e(x), space.domain, rule)
        eta += a * space.B.apply(psi, samples) * moment
    return pair.value * eta, trace
