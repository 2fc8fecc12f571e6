"""
Semi-inner products and the H_PB^A Hilbert space built from them.

This module handles:
- P- and B-semi-inner products by quadrature
- the inner product of the direct sum space H_P^0 + span{psi_k}
- B-orthonormalization of null-space bases (modified Gram-Schmidt)
- decomposition f = f_P + f_B and the membership test built on it
- the boundary kernels Psi_j whose native spaces characterize membership
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import OperatorSystem, VectorBoundaryOperator
from .errors import DecompositionError, DegeneracyError, InputError, OrthonormalityError
from .functions import LinearCombination, Polynomial, SmoothFunction, as_points
from .quad import QuadratureRule, default_rule, integrate_boundary, integrate_interior

logger = logging.getLogger(__name__)

NULL_TOL = 1e-9
GRAM_TOL = 1e-10
DEGENERACY_TOL = 1e-12
BOUNDARY_RESIDUAL_TOL = 1e-9


def _b_inner(B: VectorBoundaryOperator, f: SmoothFunction, g: SmoothFunction,
             rule: QuadratureRule) -> float:
    def integrand(x):
        return np.sum(B.apply(f, x) * B.apply(g, x), axis=0)

    return integrate_boundary(integrand, B.domain, rule)


def b_gram(functions: Sequence[SmoothFunction], B: VectorBoundaryOperator,
            rule: QuadratureRule) -> np.ndarray:
    n = len(functions)
    gram = np.zeros((n, n))
    for k in range(n):
        for l in range(k, n):
            gram[k, l] = gram[l, k] = _b_inner(B, functions[k], functions[l], rule)
    return gram


@dataclass(frozen=True)
class NullSpacePair:
    """A = {psi_k; a_k}: B-orthonormal null-space functions with positive weights.

    Zero weights are encoded by leaving the function out.
    """

    functions: Tuple[SmoothFunction, ...] = ()
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "weights", tuple(float(a) for a in self.weights))
        if len(self.functions) != len(self.weights):
            raise InputError("Every null-space function needs exactly one weight")
        if any(not a > 0 for a in self.weights):
            raise InputError("Null-space weights must be positive; omit zero-weight entries")

    @property
    def size(self) -> int:
        return len(self.functions)


@dataclass(frozen=True)
class SpaceDescriptor:
    """H_PB^A for an operator system; the pair is validated on construction."""

    name: str
    system: OperatorSystem
    pair: NullSpacePair = field(default_factory=NullSpacePair)
    rule: QuadratureRule = field(default_factory=default_rule)
    psi_in_null_P: bool = False

    def __post_init__(self):
        samples = self.domain.interior_samples()
        for k, psi in enumerate(self.pair.functions):
            residual = np.max(np.abs(self.L.apply(psi, samples)))
            if residual > NULL_TOL:
                raise InputError(f"psi_{k + 1} is not in Null(L): residual {residual:.3e}")
            if self.psi_in_null_P:
                residual = np.max(np.abs(self.P.apply(psi, samples)))
                if residual > GRAM_TOL:
                    raise InputError(f"psi_{k + 1} is not in Null(P): residual {residual:.3e}")
        gram = b_gram(self.pair.functions, self.B, self.rule)
        deviation = np.max(np.abs(gram - np.eye(self.pair.size)), initial=0.0)
        if deviation > GRAM_TOL:
            raise InputError(
                f"Null-space functions of {self.name!r} are not B-orthonormal "
                f"(deviation {deviation:.3e})"
            )

    @property
    def domain(self):
        return self.system.domain

    @property
    def P(self):
        return self.system.P

    @property
    def B(self):
        return self.system.B

    @property
    def L(self):
        return self.system.L

    def rule_for(self, splits: Sequence = (), *functions: SmoothFunction) -> QuadratureRule:
        kinks = [k for f in functions for k in f.kinks]
        return self.rule.with_splits(list(splits) + kinks, self.domain.dim)

    @cached_property
    def psi_p_gram(self) -> np.ndarray:
        """(psi_k, psi_l)_{P,Omega}; only needed when the psi_k are not in Null(P)."""
        psis = self.pair.functions
        n = len(psis)
        gram = np.zeros((n, n))
        for k in range(n):
            for l in range(k, n):
                gram[k, l] = gram[l, k] = p_semi_inner(self, psis[k], psis[l])
        return gram


def p_semi_inner(space: SpaceDescriptor, f: SmoothFunction, g: SmoothFunction,
                 splits: Sequence = ()) -> float:
    """sum_j (P_j f, P_j g)_Omega; splits at the given points and at kinks of f and g."""
    P = space.P

    def integrand(x):
        return np.sum(P.apply(f, x) * P.apply(g, x), axis=0)

    return integrate_interior(integrand, space.domain, space.rule_for(splits, f, g))


def b_semi_inner(space: SpaceDescriptor, f: SmoothFunction, g: SmoothFunction) -> float:
    """sum_j (B_j f, B_j g) integrated over the boundary."""
    return _b_inner(space.B, f, g, space.rule)


def fourier_coeffs(space: SpaceDescriptor, f: SmoothFunction) -> np.ndarray:
    """hat f_k = (f, psi_k)_{B, boundary}, k = 1..n_a."""
    return np.array([b_semi_inner(space, f, psi) for psi in space.pair.functions])


def hpb_inner(space: SpaceDescriptor, f: SmoothFunction, g: SmoothFunction,
              splits: Sequence = ()) -> float:
    """
    Inner product of H_PB^A:

        (f, g)_P + sum_k fk gk / a_k - sum_kl fk gl (psi_k, psi_l)_P

    The last term vanishes when every psi_k lies in Null(P).
    """
    value = p_semi_inner(space, f, g, splits)
    if space.pair.size == 0:
        return value
    f_hat = fourier_coeffs(space, f)
    g_hat = fourier_coeffs(space, g)
    value += float(np.sum(f_hat * g_hat / np.array(space.pair.weights)))
    if not space.psi_in_null_P:
        value -= float(f_hat @ space.psi_p_gram @ g_hat)
    return value


def hpb_norm(space: SpaceDescriptor, f: SmoothFunction, splits: Sequence = ()) -> float:
    return float(np.sqrt(max(hpb_inner(space, f, f, splits), 0.0)))


def orthonormalize(basis: Sequence[SmoothFunction], B: VectorBoundaryOperator,
                   rule: Optional[QuadratureRule] = None) -> List[LinearCombination]:
    """
    Modified Gram-Schmidt under the B-semi-inner product.

    Results are linear combinations of the input basis, in input order. Each
    is signed so that its first boundary sample with |value| > 1e-12 is positive.
    """
    rule = rule or default_rule()
    basis = list(basis)
    gram = b_gram(basis, B, rule)
    n = len(basis)
    # rows of coef are coordinates with respect to the input basis
    coef = np.eye(n)
    for k in range(n):
        # two projection sweeps keep orthogonality for ill-conditioned Grams
        for _ in range(2):
            for l in range(k):
                coef[k] -= (coef[k] @ gram @ coef[l]) * coef[l]
        norm_sq = coef[k] @ gram @ coef[k]
        norm = float(np.sqrt(max(norm_sq, 0.0)))
        if norm < DEGENERACY_TOL:
            raise DegeneracyError(k + 1, norm)
        coef[k] /= norm

    samples = B.domain.boundary_samples()
    result = []
    for k in range(n):
        psi = LinearCombination(basis, coef[k])
        values = psi(samples)
        significant = np.flatnonzero(np.abs(values) > DEGENERACY_TOL)
        if significant.size and values[significant[0]] < 0:
            psi = LinearCombination(basis, -coef[k])
        result.append(psi)
    deviation = np.max(np.abs(coef @ gram @ coef.T - np.eye(n)), initial=0.0)
    logger.debug("orthonormalized %d functions, Gram deviation %.2e", n, deviation)
    if deviation > GRAM_TOL:
        raise OrthonormalityError(float(deviation))
    return result


def decompose(f: SmoothFunction, null_basis: Sequence[SmoothFunction],
              B: VectorBoundaryOperator,
              rule: Optional[QuadratureRule] = None) -> Tuple[SmoothFunction, SmoothFunction]:
    """Split f = f_P + f_B with B f_P = 0 and f_B in the span of a full Null(L) basis."""
    rule = rule or default_rule()
    psis = orthonormalize(null_basis, B, rule)
    if psis:
        coeffs = [_b_inner(B, f, psi, rule) for psi in psis]
        f_B = LinearCombination(psis, coeffs)
    else:
        f_B = Polynomial.constant(0.0, f.dim)
    f_P = f - f_B
    samples = B.domain.boundary_samples()
    residual = float(np.max(np.abs(B.apply(f_P, samples))))
    if residual > BOUNDARY_RESIDUAL_TOL:
        raise DecompositionError(residual)
    return f_P, f_B


@dataclass(frozen=True)
class MembershipReport:
    in_space: bool
    coefficients: np.ndarray
    boundary_residual: float


def check_membership(space: SpaceDescriptor, f: SmoothFunction,
                     null_basis: Sequence[SmoothFunction]) -> MembershipReport:
    """
    Decide whether f lies in H_PB^A.

    f belongs iff its null-space part f_B lies in span{psi_k}, i.e. the
    directions that were given zero weight carry no boundary data of f.
    """
    _, f_B = decompose(f, null_basis, space.B, space.rule)
    coeffs = fourier_coeffs(space, f)
    remainder = f_B
    if space.pair.size:
        remainder = f_B - LinearCombination(space.pair.functions, coeffs)
    samples = space.domain.boundary_samples()
    residual = float(np.max(np.abs(space.B.apply(remainder, samples))))
    scale = 1.0 + float(np.max(np.abs(space.B.apply(f, samples))))
    return MembershipReport(
        in_space=residual <= BOUNDARY_RESIDUAL_TOL * scale,
        coefficients=coeffs,
        boundary_residual=residual,
    )


@dataclass(frozen=True)
class BoundaryKernel:
    """Psi_j(x, y) = sum_k a_k (B_j psi_k)(x) (B_j psi_k)(y) on boundary points."""

    B: VectorBoundaryOperator
    component: int
    pair: NullSpacePair

    def _traces(self, x) -> np.ndarray:
        points = self.B.domain.require_boundary(as_points(x, self.B.domain.dim))
        rows = [self.B.apply(psi, points)[self.component] for psi in self.pair.functions]
        return np.array(rows).reshape(self.pair.size, len(points))

    def __call__(self, x, y) -> np.ndarray:
        bx, by = self._traces(x), self._traces(y)
        weights = np.array(self.pair.weights).reshape(-1, 1)
        return (weights * bx).T @ by

    def gram(self, points=None) -> np.ndarray:
        if points is None:
            points = self.B.domain.boundary_samples()
        return self(points, points)


def membership_kernels(space: SpaceDescriptor) -> List[BoundaryKernel]:
    """The boundary kernels Psi_j, one per component of B."""
    return [BoundaryKernel(space.B, j, space.pair) for j in range(len(space.B))]
