"""Manifold descriptor: an immutable record of a search space's geometry.

Every factory in this package returns a :class:`ManifoldDescriptor` whose
callable fields implement tangent projection, retraction, metric, derivative
conversion, random generation and vector transport.  Solvers and diagnostics
talk to manifolds exclusively through this record, so points and tangent
vectors can be whatever representation suits the manifold (dense arrays,
factored triples, tuples of components).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from ..exceptions import (
    DegenerateStepError,
    DimensionMismatchError,
    UnsupportedOperationError,
)

Point = Any
Tangent = Any
Ambient = Any


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Geometry of one search space.

    Attributes:
        name: human-readable label, e.g. ``"Sphere(5)"``.
        dim: intrinsic dimension.
        typical_dist: positive length scale, used to size trust-region radii
            and line-search steps.
        second_order_retraction: True when the retraction matches geodesics
            to second order (gates the expected slope in Hessian checks).
        ehess2rhess: None when the manifold has no exact Euclidean-to-
            Riemannian Hessian conversion (callers fall back to finite
            differences).
    """

    name: str
    dim: int
    typical_dist: float
    inner: Callable[[Point, Tangent, Tangent], float]
    proj: Callable[[Point, Ambient], Tangent]
    retract: Callable[..., Point]
    egrad2rgrad: Callable[[Point, Ambient], Tangent]
    rand_point: Callable[[np.random.Generator], Point]
    rand_ambient: Callable[[Point, np.random.Generator], Ambient]
    transport: Callable[[Point, Point, Tangent], Tangent]
    zero_tangent: Callable[[Point], Tangent]
    lincomb: Callable[..., Tangent]
    tangent_to_ambient: Callable[[Point, Tangent], Ambient]
    constraint_violation: Callable[[Point], float]
    ehess2rhess: Optional[Callable[[Point, Ambient, Ambient, Tangent], Tangent]] = None
    second_order_retraction: bool = True

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError(f"dim must be nonnegative, got {self.dim}")
        if not self.typical_dist > 0:
            raise ValueError(f"typical_dist must be positive, got {self.typical_dist}")

    def norm(self, x: Point, u: Tangent) -> float:
        """Riemannian norm sqrt(inner(x, u, u))."""
        return math.sqrt(max(self.inner(x, u, u), 0.0))

    def rand_tangent(self, x: Point, rng: np.random.Generator) -> Tangent:
        """Unit-norm tangent vector: projected Gaussian ambient sample."""
        for _ in range(5):
            v = self.proj(x, self.rand_ambient(x, rng))
            nv = self.norm(x, v)
            if nv > 0.0:
                return self.lincomb(x, 1.0 / nv, v)
        raise DegenerateStepError(
            f"{self.name}: random ambient samples kept projecting to zero"
        )

    def apply_ehess2rhess(
        self, x: Point, egrad: Ambient, ehess_u: Ambient, u: Tangent
    ) -> Tangent:
        if self.ehess2rhess is None:
            raise UnsupportedOperationError(
                f"{self.name} has no exact ehess2rhess; use the FD Hessian"
            )
        return self.ehess2rhess(x, egrad, ehess_u, u)


# --- helpers shared by the dense-array factories -------------------------


def check_shape(x: np.ndarray, z: np.ndarray, what: str) -> None:
    if np.shape(x) != np.shape(z):
        raise DimensionMismatchError(
            f"{what}: expected shape {np.shape(x)}, got {np.shape(z)}"
        )


def trace_inner(x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    check_shape(x, u, "inner: first tangent")
    check_shape(x, v, "inner: second tangent")
    return float(np.tensordot(u, v, axes=u.ndim))


def array_zero(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)


def array_lincomb(x, a: float, u, b: float = 0.0, v=None):
    if v is None:
        return a * u
    return a * u + b * v


def array_identity_ambient(x, u):
    return u


def qr_positive(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the sign convention diag(R) > 0 (makes QR deterministic)."""
    q, r = np.linalg.qr(a)
    d = np.sign(np.diagonal(r)).copy()
    d[d == 0] = 1.0
    return q * d, r * d[:, None]
