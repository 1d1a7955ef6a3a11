#!/usr/bin/env python3
"""
Exception hierarchy for Fixpoint.

Each class carries the process exit code the CLI maps it to, so a failed run
can be told apart from a completed one that merely found counterexamples.
"""


class FixpointError(Exception):
    """Base class for every error raised by the library."""
    exit_code = 1


class UsageError(FixpointError):
    """Raised when an operation is called outside its preconditions."""
    exit_code = 2


class EmptyGroundSetError(UsageError):
    """Raised when a ground set of size zero is requested."""


class ParseError(FixpointError):
    """Raised when partition, map or family text is malformed."""
    exit_code = 3

    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DimensionError(FixpointError):
    """Raised when objects over different ground sets are combined."""
    exit_code = 4


class ValidationError(FixpointError):
    """Raised when a value violates its own construction invariants."""
    exit_code = 5


class OrderError(FixpointError):
    """Raised when a coarsening map is requested for an incomparable pair."""
    exit_code = 6


class ResourceGuardError(FixpointError):
    """Raised when a size ceiling is exceeded without an override."""
    exit_code = 7


class PointError(FixpointError):
    """Raised when a point lies outside the ground set."""
    exit_code = 8


class ReportError(FixpointError):
    """Raised when a stored report cannot be read or is malformed."""
    exit_code = 9


class InternalConsistencyError(FixpointError):
    """Raised when a mathematically guaranteed property fails; always a bug."""
    exit_code = 70
