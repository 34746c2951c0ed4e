"""Error types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
BackendError -> 3.
"""


class TtqaError(Exception):
    """Base class for all package errors."""


class ConfigError(TtqaError):
    """Invalid configuration or command-line usage."""


class DataError(TtqaError):
    """Malformed or inconsistent input data (corpus records, artifacts, refs)."""


class BackendError(TtqaError):
    """Completion backend failure (HTTP errors, unscripted mock prompts)."""


class ProgramParseError(DataError):
    """Unparseable answer program; carries a character position."""

    def __init__(self, message: str, pos: int | None = None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


class ProgramEvalError(DataError):
    """Program parsed but cannot be evaluated (division by zero, bad operand)."""
