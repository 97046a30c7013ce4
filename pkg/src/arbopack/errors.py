"""Exception types shared across the package."""

from __future__ import annotations


class ArbopackError(Exception):
    """Base class for package-specific errors."""


class ParseError(ArbopackError):
    """Malformed input document; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CapacityError(ArbopackError):
    """An exhaustive code path was asked to exceed a configured bound."""


class InvariantError(ArbopackError):
    """Internal consistency breach.  Indicates a bug, not bad input."""
