"""Exception types shared across the library."""


class CayleyLabError(Exception):
    """Base class for all library-specific errors."""


class BudgetExceededError(CayleyLabError):
    """A ball enumeration would exceed the configured vertex budget."""

    def __init__(self, message, visited=None, budget=None):
        super().__init__(message)
        self.visited = visited
        self.budget = budget


class RangeExhaustedError(CayleyLabError):
    """No valid scale pair exists within the computed table.

    Signals that more radii are needed, or that the growth data is
    super-polynomial so no table will ever suffice.
    """


class VersionMismatchError(CayleyLabError):
    """A cache file was written with an incompatible format version."""


class CorruptFileError(CayleyLabError):
    """A cache file is truncated or structurally invalid."""


class DomainMismatchError(CayleyLabError):
    """A function and an integration domain refer to different balls."""


class CoverageError(CayleyLabError):
    """A basis ball is too small to cover the requested region."""


class DivergenceError(CayleyLabError):
    """Gradient descent increased the energy repeatedly; step too large."""


class InsufficientDataError(CayleyLabError):
    """A table is too short for the requested estimate."""
