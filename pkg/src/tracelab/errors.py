"""Exception hierarchy.

The CLI maps :class:`VerificationError` to exit code 1 and every other
:class:`TraceLabError` to exit code 2.
"""


class TraceLabError(Exception):
    """Base class for all library errors."""


class DomainError(TraceLabError, ValueError):
    """A point lies outside the domain of a metric or weight."""


class SchemaError(TraceLabError, ValueError):
    """Malformed input data; ``pointer`` is a JSON pointer when known."""

    def __init__(self, message: str, pointer: str | None = None):
        self.pointer = pointer
        if pointer is not None:
            message = f"{pointer}: {message}"
        super().__init__(message)


class PreconditionError(TraceLabError, ValueError):
    """An operation was called outside its stated preconditions."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class BudgetError(TraceLabError):
    """Exhaustive enumeration would exceed the tuple budget."""


class ConditioningError(TraceLabError):
    """The instance is too large or too ill-conditioned for double precision."""


class VerificationError(TraceLabError):
    """A constructed object failed its own post-condition check."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)
