class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class ConstraintError(ValueError):
    """An offloading matrix or bandwidth split violates a problem constraint.

    ``constraint`` is ``"C1"`` (offloading fractions) or ``"C2"`` (bandwidth
    conservation).
    """

    def __init__(self, constraint, message):
        self.constraint = constraint
        super().__init__(f"constraint {constraint} violated: {message}")


class InfeasibleOffloadError(ValueError):
    """A user offloads a positive fraction over a link with zero rate."""

    def __init__(self, user, message=None):
        self.user = user
        super().__init__(message or f"user {user} offloads over a zero-rate link")


class ShapeError(ValueError):
    pass


class NumericError(FloatingPointError):
    pass


class EnumerationTooLarge(ValueError):
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"grid has {size} candidates, above the limit of {limit}")
