"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside an operation's mathematical domain."""


class DataError(ValueError):
    """Input data violates a structural requirement (shape, margins, parsing)."""


class NumericError(RuntimeError):
    """A numeric procedure failed: non-convergence, broken bound, iteration cap."""
