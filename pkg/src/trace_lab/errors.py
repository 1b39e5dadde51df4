"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input violates a documented precondition."""


class NumericalFailure(RuntimeError):
    """A numerical routine failed to converge or returned unusable output."""


class SingularMatrixError(NumericalFailure):
    """A matrix that must be inverted is singular beyond the conditioning cap."""
