"""Exception types raised by the library."""

from __future__ import annotations


class BlockSizeError(ValueError):
    """Block alphabet would exceed the configured size cap."""


class CodeDesignError(ValueError):
    """A code cannot be built for the given distribution or length limit."""


class InfeasibleCodeError(CodeDesignError):
    """No candidate code is stable at the requested blocklength and rate."""

    def __init__(self, min_mean_len: float, capacity: float) -> None:
        self.min_mean_len = min_mean_len
        self.capacity = capacity
        super().__init__(
            f"no stable code: minimum achievable E[L] = {min_mean_len:.6g} bits "
            f"is not below B*R = {capacity:.6g} bits"
        )


class UnstableSourceError(ValueError):
    """The worked example's buffer chain has no stationary law (q <= 1/3)."""
