"""Exception hierarchy.

FAQUserError and its subclasses mark problems in user input (bad query text,
bad data files, invalid orderings); the CLI maps them to exit status 1.
InternalError marks violated internal invariants and maps to exit status 2.
"""


class FAQUserError(Exception):
    """Base class for errors caused by user input."""


class QuerySyntaxError(FAQUserError):
    """Malformed query text. Carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class QueryValidationError(FAQUserError):
    """Structurally valid query text that violates a semantic rule."""


class DataError(FAQUserError):
    """Bad factor data: arity mismatch, unparsable value, duplicate key."""


class UncoverableVertexError(FAQUserError):
    """A vertex that no hyperedge covers makes the cover LP infeasible."""

    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex!r} is not covered by any hyperedge")


class OracleExplosionError(FAQUserError):
    """Brute-force enumeration would exceed the assignment guard."""

    def __init__(self, count, limit):
        self.count = count
        self.limit = limit
        super().__init__(
            f"brute-force evaluation refused: {count} assignments exceeds guard of {limit}"
        )


class InternalError(Exception):
    """An internal invariant failed; indicates a bug, not a user error."""
