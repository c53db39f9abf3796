"""Exception types shared across the package."""

from __future__ import annotations


class ShearKitError(Exception):
    """Base class for all package errors."""


class RegimeMismatch(ShearKitError):
    """Raised when exact and approximate coefficients meet in one operation."""


class ArityMismatch(ShearKitError):
    """Raised when operands disagree on the number of variables."""


class ParseError(ShearKitError):
    """Syntax error in the polynomial or vector-field grammar."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


class PreconditionError(ShearKitError):
    """One or more documented preconditions failed; nothing was computed.

    A violated precondition is always reported as an error, never folded
    into a false verdict.
    """

    def __init__(self, violations) -> None:
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
