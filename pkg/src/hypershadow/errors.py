"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested computation."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical method failed to converge."""
