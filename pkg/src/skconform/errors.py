"""Exception hierarchy.

Every failure raised by the library derives from :class:`SKError`. The CLI maps
:class:`ParseError` to exit code 2 and every other ``SKError`` to exit code 1.
"""

from __future__ import annotations


class SKError(Exception):
    """Base class for all domain errors."""


class ValidationError(SKError, ValueError):
    """An input violates a domain invariant."""


class NegativeEntry(ValidationError):
    pass


class ColumnSumViolation(ValidationError):
    pass


class NonFiniteEntry(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class AlphabetMismatch(ValidationError):
    pass


class EmptyTrace(ValidationError):
    pass


class EmptyVector(ValidationError):
    pass


class EmptyModel(ValidationError):
    pass


class EmptyLog(EmptyModel):
    pass


class EmptyModelList(ValidationError):
    pass


class EmptyPairs(ValidationError):
    pass


class NoLengthCompatibleTrace(ValidationError):
    pass


class ExplosionGuard(SKError):
    """Enumeration would exceed the configured realization cap."""


class UnknownLabel(ValidationError):
    pass


class ZeroFrequency(ValidationError):
    pass


class ParseError(SKError):
    """Malformed text input. Carries the 1-based line (and column when known)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
