"""Exception types shared across the package."""


class HiddenClusterError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HiddenClusterError, ValueError):
    """An argument violates a documented precondition or invariant."""


class UnsupportedMeasurement(HiddenClusterError):
    """The symbolic measurement rules do not apply to the targeted node."""


class UnsupportedTopology(HiddenClusterError):
    """The graph shape is outside what the rewrite rules cover."""


class GraphParseError(HiddenClusterError, ValueError):
    """A serialized graph document is malformed."""
