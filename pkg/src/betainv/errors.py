"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(ArithmeticError):
    """An iteration failed to meet its tolerance within the iteration cap.

    Under the documented preconditions this indicates a bug or a pathological
    input rather than a user error.
    """
