"""Exception types shared across the package."""


class SortclustError(Exception):
    """Base class for all package-specific errors."""


class DataFormatError(SortclustError, ValueError):
    """Malformed input data (parse failures, inconsistent dimensions).

    ``line`` is the 1-based line number of the offending record when the
    error originates from a file parser, else None.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidInputError(SortclustError, ValueError):
    """Arguments violate an operation's preconditions."""


class UndefinedDistanceError(SortclustError, ValueError):
    """Distance is undefined for the given pair (two all-zero fingerprints)."""


class InvalidSpecError(SortclustError, ValueError):
    """A synthetic-data specification violates its own constraints."""


class InternalInvariantError(SortclustError, RuntimeError):
    """A postcondition the pipeline guarantees was violated. Always a bug."""
