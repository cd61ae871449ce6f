"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations


class DelegationError(Exception):
    """Base class for all errors raised by this package."""


class ParameterDomainError(DelegationError, ValueError):
    """A model input violates its domain (CLI exit code 2)."""


class MissingParameterError(ParameterDomainError):
    """A required parameter such as ``beta`` was not supplied."""


class ConfigError(ParameterDomainError):
    """A simulation or run configuration is invalid."""


class GridSpecError(ParameterDomainError):
    """A sweep grid specification is invalid."""


class InsufficientDataError(DelegationError, ValueError):
    """Not enough trial records to form an estimate (CLI exit code 3)."""


class IngestionError(DelegationError):
    """A trial log could not be parsed (CLI exit code 3)."""

    def __init__(self, message: str, lineno: int | None = None) -> None:
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
