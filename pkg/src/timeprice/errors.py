"""Exception types raised across the package."""


class InvalidInstanceError(ValueError):
    """A type distribution violates its invariants."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(self.violations) or "invalid instance")


class InvalidLineError(ValueError):
    """Segments do not form a concave, non-decreasing chain."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(self.violations) or "invalid separation line")


class DegenerateSegmentError(ValueError):
    """Two points or two segments do not determine the requested object."""


class NumericalFailure(ArithmeticError):
    """Quadrature did not reach the requested accuracy."""


class OracleCapExceeded(ValueError):
    """The brute-force oracle refuses instances above its size cap."""
