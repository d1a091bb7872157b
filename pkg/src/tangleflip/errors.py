"""Exception types shared across the package."""


class TangleflipError(Exception):
    """Base class for all package-specific errors."""


class CapExceeded(TangleflipError):
    """A size cap protecting an exhaustive computation was exceeded."""


class DiagonalAbsent(TangleflipError):
    """The requested diagonal is not present in the triangulation."""


class Disconnected(TangleflipError):
    """A graph expected to be connected is not."""

    def __init__(self, components: int):
        super().__init__(f"graph is disconnected ({components} components)")
        self.components = components


class NotDisjoint(TangleflipError):
    """Two triangulations share a diagonal where disjointness is required."""


class NotIrreducible(TangleflipError):
    """A layout contains a proper subtanglegram where none is allowed."""


class NotPlanarLayout(TangleflipError):
    """The given data does not describe a crossing-free layout."""


class InvalidNode(TangleflipError):
    """The node handle does not name a rotatable tree vertex."""


class SizeMismatch(TangleflipError):
    """Block list length does not match the host layout size."""


class TablesMissing(TangleflipError):
    """The count tables do not cover the requested size."""


class OutOfRange(TangleflipError):
    """Index outside the computed table range."""


class DivisibilityViolation(TangleflipError):
    """An exact integer division left a remainder; signals a counting bug."""


class UnknownCategory(TangleflipError):
    """A sampled object fell outside the enumerated support."""


class CacheCorrupt(TangleflipError):
    """A cache file failed its checksum; refusing to use it."""


class ConfigError(TangleflipError):
    """Sampler or CLI configuration is inconsistent with the request."""
