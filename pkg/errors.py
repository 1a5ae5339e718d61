"""
Exception hierarchy for lamhom.

The CLI maps these onto exit codes:
  ConfigError       -> 1
  SolverError       -> 2
  ValidationFailure -> 3
"""

from typing import Any, Optional, Sequence, Tuple


class LamhomError(Exception):
    """Base class for every error raised on purpose by lamhom."""


class ConfigError(LamhomError, ValueError):
    """
    A study configuration or laminate descriptor could not be turned into
    domain objects.

    Args:
        message: human readable reason
        loc: path of keys/indices inside the JSON document, used to find the
            offending line when the original text is available
        line: 1-based line number when already known (JSON syntax errors)
    """

    def __init__(self, message: str, loc: Sequence[Any] = (), line: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.loc: Tuple[Any, ...] = tuple(loc)
        self.line = line


class SolverError(LamhomError, RuntimeError):
    """A linear solve failed or returned a residual above tolerance."""


class ValidationFailure(LamhomError):
    """One or more invariant checks failed."""

    def __init__(self, failed: Sequence[str]):
        super().__init__("failed checks: " + ", ".join(failed))
        self.failed = list(failed)
