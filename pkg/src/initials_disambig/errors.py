"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class DisambigError(Exception):
    """Base class for all errors raised by this package."""


class NameParseError(DisambigError, ValueError):
    """An author name or author field could not be decomposed."""

    def __init__(self, message: str, raw: str | None = None, position: int | None = None):
        super().__init__(message)
        self.raw = raw
        self.position = position


class DatasetFormatError(DisambigError, ValueError):
    """A dataset file violates its declared schema."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InsufficientDataError(DisambigError, ValueError):
    """The input does not contain enough data for the requested estimate."""


class MissingTruthError(DisambigError, ValueError):
    """Ground-truth identities are required but the dataset has none."""


class ConfigError(DisambigError, ValueError):
    """A simulation config has an invalid or unknown field."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
