"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class FitError(RuntimeError):
    """A least-squares fit could not be carried out."""


class GridMismatchError(ValueError):
    """Two curves cannot be compared point by point."""
