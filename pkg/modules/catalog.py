"""
Named operator systems, spaces, kernels and test functions.

The CLI resolves every user-supplied name through the registries here, so an
unknown name fails with the list of valid ones.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from .core import (
    BoundaryTerm,
    CatalogOperatorL,
    DiffTerm,
    Domain,
    OperatorSystem,
    VectorBoundaryOperator,
    VectorDiffOperator,
)
from .errors import InputError
from .functions import Exponential, Polynomial, SmoothFunction, Sinusoid
from .hilbert import NullSpacePair, SpaceDescriptor, orthonormalize
from .kernels import (
    UNIT_INTERVAL,
    UNIT_SQUARE,
    AbsCounterexample,
    BrownianBridge,
    BrownianMotion,
    Kernel,
    PeriodicMin,
    SobolevGreen,
    SobolevSpline,
    ThinPlateFundamental,
    compose_K,
    make_R,
)
from .spectral import EigenPair, dirichlet_eigenpairs, mixed_eigenpairs_brownian
from .tps2d import TpsGreenKernel, linear_basis

SQRT_HALF = math.sqrt(0.5)


def _trace_operator(domain: Domain) -> VectorBoundaryOperator:
    return VectorBoundaryOperator(domain, ((BoundaryTerm((0,) * domain.dim),),))


def min_kernel_system() -> OperatorSystem:
    """P = d/dx, B = I on {0, 1}, L = -d^2/dx^2."""
    P = VectorDiffOperator(UNIT_INTERVAL, ((DiffTerm((1,)),),))
    return OperatorSystem(
        "min_kernel",
        UNIT_INTERVAL,
        P,
        _trace_operator(UNIT_INTERVAL),
        CatalogOperatorL("neg_second_derivative"),
        null_basis=(Polynomial.constant(1.0), Polynomial.coordinate(0, 1)),
    )


def sobolev_system(sigma: float) -> OperatorSystem:
    """P = (d/dx, sigma I), B = I on {0, 1}, L = -d^2/dx^2 + sigma^2."""
    if not sigma > 0:
        raise InputError("sigma must be positive")
    P = VectorDiffOperator(UNIT_INTERVAL, ((DiffTerm((1,)),), (DiffTerm((0,), sigma),)))
    return OperatorSystem(
        f"sobolev(sigma={sigma:g})",
        UNIT_INTERVAL,
        P,
        _trace_operator(UNIT_INTERVAL),
        CatalogOperatorL("neg_second_plus_sigma2", sigma),
        null_basis=(Exponential(sigma), Exponential(-sigma)),
    )


def thin_plate_system() -> OperatorSystem:
    """P = (D11, sqrt(2) D12, D22), B = (D1, D2, I) on the boundary, L = bilaplacian."""
    P = VectorDiffOperator(
        UNIT_SQUARE,
        ((DiffTerm((2, 0)),), (DiffTerm((1, 1), math.sqrt(2.0)),), (DiffTerm((0, 2)),)),
    )
    B = VectorBoundaryOperator(
        UNIT_SQUARE,
        ((BoundaryTerm((1, 0)),), (BoundaryTerm((0, 1)),), (BoundaryTerm((0, 0)),)),
    )
    return OperatorSystem(
        "thin_plate",
        UNIT_SQUARE,
        P,
        B,
        CatalogOperatorL("biharmonic_2d"),
        null_basis=tuple(linear_basis()),
    )


def sobolev_pair(sigma: float) -> NullSpacePair:
    """
    B-orthonormal exponentials with psi_1(0) = -psi_1(1) = psi_2(0) = psi_2(1) = 1/sqrt(2).

    Written with decaying exponentials only so large sigma does not overflow.
    """
    decay = math.exp(-sigma)
    odd = SQRT_HALF / -math.expm1(-sigma)
    even = SQRT_HALF / (1.0 + decay)
    psi1 = Exponential(-sigma, odd) - Exponential(sigma, odd * decay)
    psi2 = Exponential(-sigma, even) + Exponential(sigma, even * decay)
    a1 = -math.expm1(-sigma) / (2.0 * sigma)
    a2 = (1.0 + decay) / (2.0 * sigma)
    return NullSpacePair((psi1, psi2), (a1, a2))


def bridge() -> SpaceDescriptor:
    return SpaceDescriptor("bridge", min_kernel_system())


def brownian_motion() -> SpaceDescriptor:
    pair = NullSpacePair((Polynomial.coordinate(0, 1),), (1.0,))
    return SpaceDescriptor("brownian_motion", min_kernel_system(), pair)


def periodic() -> SpaceDescriptor:
    pair = NullSpacePair((Polynomial.constant(SQRT_HALF),), (1.0,))
    return SpaceDescriptor("periodic", min_kernel_system(), pair, psi_in_null_P=True)


def sobolev(sigma: float = 1.0) -> SpaceDescriptor:
    return SpaceDescriptor(f"sobolev(sigma={sigma:g})", sobolev_system(sigma), sobolev_pair(sigma))


def sobolev_dirichlet(sigma: float = 1.0) -> SpaceDescriptor:
    return SpaceDescriptor(f"sobolev_dirichlet(sigma={sigma:g})", sobolev_system(sigma))


def thin_plate() -> SpaceDescriptor:
    system = thin_plate_system()
    psis = orthonormalize(system.null_basis, system.B)
    pair = NullSpacePair(psis, (1.0,) * len(psis))
    return SpaceDescriptor("thin_plate", system, pair, psi_in_null_P=True)


SPACES: Dict[str, Callable[..., SpaceDescriptor]] = {
    "bridge": lambda sigma=1.0: bridge(),
    "brownian_motion": lambda sigma=1.0: brownian_motion(),
    "periodic": lambda sigma=1.0: periodic(),
    "sobolev": sobolev,
    "sobolev_dirichlet": sobolev_dirichlet,
    "thin_plate": lambda sigma=1.0: thin_plate(),
}

KERNELS: Dict[str, Callable[..., Kernel]] = {
    "brownian_bridge": lambda sigma=1.0, n=64: BrownianBridge(),
    "brownian_motion": lambda sigma=1.0, n=64: BrownianMotion(),
    "periodic_min": lambda sigma=1.0, n=64: PeriodicMin(),
    "sobolev_G": lambda sigma=1.0, n=64: SobolevGreen(sigma),
    "sobolev_K": lambda sigma=1.0, n=64: SobolevSpline(sigma),
    "abs_counterexample": lambda sigma=1.0, n=64: AbsCounterexample(),
    "tps_fundamental": lambda sigma=1.0, n=64: ThinPlateFundamental(),
    "tps_G": lambda sigma=1.0, n=64: TpsGreenKernel(n),
}

# kernel reproducing each one-dimensional space
SPACE_KERNELS = {
    "bridge": "brownian_bridge",
    "brownian_motion": "brownian_motion",
    "periodic": "periodic_min",
    "sobolev": "sobolev_K",
    "sobolev_dirichlet": "sobolev_G",
}

TEST_FUNCTIONS: Dict[str, SmoothFunction] = {
    "sin_pi": Sinusoid(math.pi),
    "bubble": Polynomial([0.0, 1.0, -1.0]),
    "x2_bubble": Polynomial([0.0, 0.0, 1.0, -1.0]),
    "identity": Polynomial([0.0, 1.0]),
    "sin_half_pi": Sinusoid(0.5 * math.pi),
    "zero": Polynomial.constant(0.0),
}

EIGEN_FAMILIES = ("bridge", "sobolev_dirichlet", "brownian_motion")


def _lookup(registry: dict, name: str, what: str):
    if name not in registry:
        raise InputError(f"Unknown {what} {name!r}; valid names: {', '.join(sorted(registry))}")
    return registry[name]


def get_space(name: str, sigma: float = 1.0) -> SpaceDescriptor:
    return _lookup(SPACES, name, "space")(sigma=sigma)


def get_kernel(name: str, sigma: float = 1.0, n: int = 64) -> Kernel:
    return _lookup(KERNELS, name, "kernel")(sigma=sigma, n=n)


def get_function(name: str) -> SmoothFunction:
    return _lookup(TEST_FUNCTIONS, name, "function")


def space_kernel(space_name: str, sigma: float = 1.0) -> Kernel:
    return get_kernel(_lookup(SPACE_KERNELS, space_name, "one-dimensional space"), sigma)


def eigen_family(name: str, sigma: float, n: int) -> Tuple[SpaceDescriptor, Kernel, List[EigenPair]]:
    """Space, reproducing kernel and closed-form eigenpairs of a family."""
    _lookup({k: k for k in EIGEN_FAMILIES}, name, "eigen family")
    if name == "bridge":
        return bridge(), BrownianBridge(), dirichlet_eigenpairs(0.0, n)
    if name == "sobolev_dirichlet":
        return sobolev_dirichlet(sigma), SobolevGreen(sigma), dirichlet_eigenpairs(sigma, n)
    return brownian_motion(), BrownianMotion(), mixed_eigenpairs_brownian(n)


COMPOSE_FAMILIES = ("min", "sobolev")

# compose-check family names accepted by eig-check
EIGEN_ALIASES = {"min": "bridge", "sobolev": "sobolev_dirichlet"}

FAMILIES = tuple(sorted(set(COMPOSE_FAMILIES) | set(EIGEN_FAMILIES)))


def composition_residuals(family: str, sigma: float = 1.0, grid_size: int = 101) -> Dict[str, float]:
    """Max grid discrepancy of each G + R = K identity of a kernel family."""
    _lookup({k: k for k in COMPOSE_FAMILIES}, family, "kernel family")
    grid = np.linspace(0.0, 1.0, grid_size)
    if family == "min":
        checks = {
            "bridge+xy=motion": (compose_K(BrownianBridge(), make_R(brownian_motion().pair)),
                                 BrownianMotion()),
            "bridge+1/2=periodic": (compose_K(BrownianBridge(), make_R(periodic().pair)),
                                    PeriodicMin()),
        }
    else:
        checks = {
            "sobolev_G+R=sobolev_K": (compose_K(SobolevGreen(sigma), make_R(sobolev_pair(sigma))),
                                      SobolevSpline(sigma)),
        }
    return {name: float(np.max(np.abs(K(grid, grid) - target(grid, grid))))
            for name, (K, target) in checks.items()}
