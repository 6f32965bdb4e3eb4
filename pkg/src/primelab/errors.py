"""Shared exception types.

Exit-code mapping used by the command line front end: precondition and
domain failures are ValueError subclasses (exit 2), resource ceilings are
ResourceLimitError (exit 3), and InvariantViolation marks a broken internal
identity that must never pass silently (exit 4).
"""

from __future__ import annotations


class BasisTooSmallError(ValueError):
    """A prime basis does not cover the primes an operation needs."""

    def __init__(self, needed: int, limit: int, what: str = "operation"):
        self.needed = needed
        self.limit = limit
        super().__init__(
            f"{what} needs primes up to {needed}, but basis only covers up to {limit}"
        )


class ShiftDepthError(ValueError):
    """A shift has fewer residues than the evaluation depth requires."""

    def __init__(self, needed: int, depth: int):
        self.needed = needed
        self.depth = depth
        super().__init__(f"shift of depth {depth} is too shallow: need depth {needed}")


class ResourceLimitError(RuntimeError):
    """A configurable resource ceiling (survivors, divisor nodes, ...) was hit."""


class InvariantViolation(RuntimeError):
    """An internal algebraic identity failed; results cannot be trusted."""
