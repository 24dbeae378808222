"""Exception hierarchy, mirrored by the CLI exit codes."""


class QdsolveError(Exception):
    """Base class for all library errors."""


class UsageError(QdsolveError):
    """Bad command-line usage (exit code 1)."""


class ProblemFormatError(QdsolveError):
    """Malformed problem or solution file (exit code 1)."""


class PreconditionError(QdsolveError):
    """Violated semantic precondition: field, gamma or spectrum (exit code 2)."""


class SpectrumError(PreconditionError):
    """The constant matrix fails the good-spectrum condition."""


class InternalInvariantError(QdsolveError):
    """An internal exactness invariant failed (exit code 3)."""
