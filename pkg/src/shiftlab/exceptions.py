"""
Exception hierarchy shared by every shiftlab module
"""
from typing import Optional


class ShiftlabError(Exception):
    """Base class for all errors raised by shiftlab."""


class ConfigurationError(ShiftlabError, ValueError):
    """Invalid configuration: bad values, weight-rule gaps, malformed blocks."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class NoninvertibleOperatorError(ShiftlabError):
    """A weight fell below the invertibility floor where an inverse was needed."""


class DomainError(ShiftlabError, ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(ShiftlabError):
    """A mathematical hypothesis of a check does not hold."""
