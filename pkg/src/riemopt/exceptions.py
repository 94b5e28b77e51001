"""Exception types shared across the library."""


class RiemoptError(Exception):
    """Base class for library errors."""


class DimensionMismatchError(RiemoptError, ValueError):
    """Array shapes are incompatible with the manifold's representation."""


class DegenerateStepError(RiemoptError, RuntimeError):
    """A retraction or normalization hit a zero (or near-zero) vector."""


class RankCollapseError(RiemoptError, RuntimeError):
    """A fixed-rank retraction produced a numerically rank-deficient point."""


class UnsupportedOperationError(RiemoptError, RuntimeError):
    """The requested geometry operation is not available on this manifold."""


class MissingDerivativeError(RiemoptError, ValueError):
    """The problem definition lacks a derivative required by the caller."""
