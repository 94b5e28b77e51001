from .base import ManifoldDescriptor
from .euclidean import euclidean_factory, product_factory
from .fixed_rank import FixedRankPoint, FixedRankTangent, fixed_rank_factory
from .orthogonal import grassmann_factory, rotations_factory, stiefel_factory
from .spheres import (
    elliptope_factory,
    oblique_factory,
    spectrahedron_factory,
    sphere_factory,
)

__all__ = [
    "ManifoldDescriptor",
    "FixedRankPoint",
    "FixedRankTangent",
    "sphere_factory",
    "oblique_factory",
    "stiefel_factory",
    "grassmann_factory",
    "rotations_factory",
    "fixed_rank_factory",
    "elliptope_factory",
    "spectrahedron_factory",
    "euclidean_factory",
    "product_factory",
]
