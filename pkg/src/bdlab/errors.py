"""Shared exception types."""


class MismatchError(ValueError):
    """Operands live in different algebras, stages, or shapes."""


class BudgetError(RuntimeError):
    """A resource limit was hit: degree cap, conductor bound, or refinement budget."""
