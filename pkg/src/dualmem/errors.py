"""Exception types shared across the package.

``DataError`` subclasses signal bad input data or files (CLI exit code 3);
everything else under ``DualMemError`` is a runtime failure (exit code 4).
"""


class DualMemError(Exception):
    """Base class for all package errors."""


class DataError(DualMemError, ValueError):
    """Input data violates a documented contract."""


class EmptyText(DataError):
    """Text has no alphanumeric token to embed."""


class DimensionMismatch(DataError):
    pass


class ZeroVector(DataError):
    pass


class DuplicateId(DataError):
    pass


class GraphTooLarge(DataError):
    pass


class CounterRegression(DataError):
    """A retention score was requested for a counter older than the entry's last access."""


class EmptyCluster(DataError):
    pass


class UnsuccessfulTrajectory(DataError):
    pass


class InvalidWorkflow(DataError):
    pass


class UnboundPlaceholder(DataError):
    def __init__(self, *names: str):
        self.names = tuple(names)
        super().__init__(", ".join(names))


class NoMatch(DualMemError):
    """No on-screen element matched a patch above the similarity floor."""


class DegenerateSpec(DataError):
    pass


class ReachabilityLost(DualMemError):
    pass


class ProviderMismatch(DataError):
    pass


class UnknownFormatVersion(DataError):
    pass


class CorruptRecord(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IoFailure(DualMemError, OSError):
    pass
