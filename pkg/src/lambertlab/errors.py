class InvalidInput(ValueError):
    """Inputs are inconsistent in dimension or violate a precondition."""


class NumericFailure(ArithmeticError):
    """An iterative solver did not converge within its iteration cap."""


class UnboundedConjugate(ArithmeticError):
    """The complementary function is +inf at the requested argument."""


class DimensionRefusal(InvalidInput):
    """The net search would be too expensive for this many points."""
