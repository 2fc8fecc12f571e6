"""
Exception hierarchy shared by every module.

Library code raises these; only the CLI catches them and turns them into exit codes.
"""

from __future__ import annotations

from typing import Optional, Sequence


class GreenKernelError(Exception):
    """Base class for all library errors."""


class DomainError(GreenKernelError):
    """A point lies on the wrong part of a domain, or two domains disagree."""


class UnsupportedFunctionError(GreenKernelError):
    """A derivative oracle or operator does not cover the requested order."""


class IntegrandError(GreenKernelError):
    """An integrand returned a non-finite value at a quadrature node."""

    def __init__(self, node: Sequence[float], value: float):
        self.node = tuple(float(v) for v in node)
        self.value = value
        super().__init__(f"Non-finite integrand value {value!r} at node {self.node}")


class KinkError(GreenKernelError):
    """A kernel derivative was requested exactly on its diagonal kink."""


class DegeneracyError(GreenKernelError):
    """Gram-Schmidt produced a (numerically) zero vector."""

    def __init__(self, index: int, norm: float):
        self.index = index
        self.norm = norm
        super().__init__(
            f"Basis function {index} is degenerate under the boundary semi-inner "
            f"product (post-projection norm {norm:.3e})"
        )


class OrthonormalityError(GreenKernelError):
    """The B-Gram matrix of an orthonormalized basis is not the identity."""

    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"Orthonormalized basis has B-Gram deviation {deviation:.3e} from the identity")


class DecompositionError(GreenKernelError):
    """The null-space basis does not reproduce the boundary data of f."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(
            f"Boundary residual {residual:.3e} after decomposition; "
            "the supplied basis does not span Null(L)"
        )


class NotPositiveDefiniteError(GreenKernelError):
    """The Gram matrix of a fit is singular or indefinite."""

    def __init__(self, verdict: str, detail: Optional[str] = None):
        self.verdict = verdict
        label = getattr(verdict, "value", verdict)
        message = f"Gram matrix is not positive definite: {label}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class InputError(GreenKernelError):
    """Bad user input: names, sizes, CSV contents."""


class SolverError(GreenKernelError):
    """The corrector linear system could not be solved."""


class ConfigError(GreenKernelError):
    """Invalid environment configuration."""
