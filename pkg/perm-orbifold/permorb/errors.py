"""
Error types
Exceptions raised by the services, each carrying the process exit code the CLI returns.
"""

from typing import Optional


class PermorbError(Exception):
    """Base class for all permorb failures."""

    exit_code: int = 2

    def __init__(self, message: str, detail: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def __str__(self) -> str:
        if self.detail:
            return f"{self.message} ({self.detail})"
        return self.message


class InputError(PermorbError):
    """Malformed files, inconsistent dimensions, unknown builtins, bad run configuration."""

    exit_code = 2


class VerificationError(PermorbError):
    """A property suite reported at least one failing check."""

    exit_code = 1


class BudgetExceededError(PermorbError):
    """An enumeration would exceed the configured tuple budget."""

    exit_code = 3
