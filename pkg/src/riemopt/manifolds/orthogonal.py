"""Orthonormal-frame geometries: Stiefel, Grassmann, rotation group.

All three store points as matrices with orthonormal columns and retract via
the Q factor of a thin QR decomposition with positive diagonal R (so the
retraction is a deterministic function).  The rotation retraction flips the
sign of the last Q column if rounding pushed the determinant to -1.
"""

from __future__ import annotations

import math

import numpy as np

from .base import (
    ManifoldDescriptor,
    array_identity_ambient,
    array_lincomb,
    array_zero,
    check_shape,
    qr_positive,
    trace_inner,
)


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def _skew(a: np.ndarray) -> np.ndarray:
    return (a - a.T) / 2.0


def stiefel_factory(n: int, p: int) -> ManifoldDescriptor:
    """Orthonormal n x p matrices, X'X = I_p."""
    if p < 1 or p > n:
        raise ValueError(f"stiefel_factory: need 1 <= p <= n, got ({n}, {p})")

    def proj(x, z):
        check_shape(x, z, "stiefel proj")
        return z - x @ _sym(x.T @ z)

    def retract(x, u, t=1.0):
        if t == 0 or not np.any(u):
            return x
        q, _ = qr_positive(x + t * u)
        return q

    def ehess2rhess(x, egrad, ehess_u, u):
        return proj(x, ehess_u - u @ _sym(x.T @ egrad))

    def rand_point(rng):
        q, _ = qr_positive(rng.standard_normal((n, p)))
        return q

    return ManifoldDescriptor(
        name=f"Stiefel({n},{p})",
        dim=n * p - p * (p + 1) // 2,
        typical_dist=math.pi * math.sqrt(p),
        inner=trace_inner,
        proj=proj,
        retract=retract,
        egrad2rgrad=proj,
        ehess2rhess=ehess2rhess,
        rand_point=rand_point,
        rand_ambient=lambda x, rng: rng.standard_normal((n, p)),
        transport=lambda x, y, u: proj(y, u),
        zero_tangent=array_zero,
        lincomb=array_lincomb,
        tangent_to_ambient=array_identity_ambient,
        constraint_violation=lambda x: float(np.max(np.abs(x.T @ x - np.eye(p)))),
        # The QR retraction is first order only.
        second_order_retraction=False,
    )


def grassmann_factory(n: int, p: int) -> ManifoldDescriptor:
    """p-dimensional subspaces of R^n, stored as orthonormal representatives.

    Costs placed on this manifold must be invariant under X -> XQ for
    orthogonal Q (documented contract; not enforced at runtime).
    """
    if p < 1 or p > n:
        raise ValueError(f"grassmann_factory: need 1 <= p <= n, got ({n}, {p})")

    def proj(x, z):
        check_shape(x, z, "grassmann proj")
        return z - x @ (x.T @ z)

    def retract(x, u, t=1.0):
        if t == 0 or not np.any(u):
            return x
        q, _ = qr_positive(x + t * u)
        return q

    def ehess2rhess(x, egrad, ehess_u, u):
        return proj(x, ehess_u) - u @ (x.T @ egrad)

    def rand_point(rng):
        q, _ = qr_positive(rng.standard_normal((n, p)))
        return q

    return ManifoldDescriptor(
        name=f"Grassmann({n},{p})",
        dim=p * (n - p),
        typical_dist=math.pi * math.sqrt(p),
        inner=trace_inner,
        proj=proj,
        retract=retract,
        egrad2rgrad=proj,
        ehess2rhess=ehess2rhess,
        rand_point=rand_point,
        rand_ambient=lambda x, rng: rng.standard_normal((n, p)),
        transport=lambda x, y, u: proj(y, u),
        zero_tangent=array_zero,
        lincomb=array_lincomb,
        tangent_to_ambient=array_identity_ambient,
        constraint_violation=lambda x: float(np.max(np.abs(x.T @ x - np.eye(p)))),
        # As a map to the quotient, the Q factor spans col(X + tU), which
        # agrees with the (second-order) metric projection retraction.
        second_order_retraction=True,
    )


def rotations_factory(n: int) -> ManifoldDescriptor:
    """Special orthogonal group: X'X = I_n and det(X) = +1."""
    if n < 1:
        raise ValueError(f"rotations_factory: n must be >= 1, got {n}")

    def proj(x, z):
        check_shape(x, z, "rotations proj")
        return x @ _skew(x.T @ z)

    def _det_fix(q: np.ndarray) -> np.ndarray:
        if np.linalg.det(q) < 0:
            q = q.copy()
            q[:, -1] = -q[:, -1]
        return q

    def retract(x, u, t=1.0):
        if t == 0 or not np.any(u):
            return x
        q, _ = qr_positive(x + t * u)
        return _det_fix(q)

    def ehess2rhess(x, egrad, ehess_u, u):
        return proj(x, ehess_u - u @ _sym(x.T @ egrad))

    def rand_point(rng):
        q, _ = qr_positive(rng.standard_normal((n, n)))
        return _det_fix(q)

    def violation(x):
        v = float(np.max(np.abs(x.T @ x - np.eye(n))))
        return max(v, abs(np.linalg.det(x) - 1.0))

    return ManifoldDescriptor(
        name=f"Rotations({n})",
        dim=n * (n - 1) // 2,
        # n = 1 is a single point; any positive scale works there.
        typical_dist=math.pi * math.sqrt(n * (n - 1) / 2) / 2 if n > 1 else 1.0,
        inner=trace_inner,
        proj=proj,
        retract=retract,
        egrad2rgrad=proj,
        ehess2rhess=ehess2rhess,
        rand_point=rand_point,
        rand_ambient=lambda x, rng: rng.standard_normal((n, n)),
        transport=lambda x, y, u: proj(y, u),
        zero_tangent=array_zero,
        lincomb=array_lincomb,
        tangent_to_ambient=array_identity_ambient,
        constraint_violation=violation,
        second_order_retraction=False,
    )
