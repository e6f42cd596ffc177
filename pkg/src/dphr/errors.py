"""Exception types shared across the library."""


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class DimensionError(ValidationError):
    """Array shapes are incompatible with the requested operation."""


class BatchTooSmallError(ValidationError):
    """A batch has fewer than two rows, so no negatives exist."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss.

    Carries the iteration index at which the loss left the finite range.
    """

    def __init__(self, iteration: int, message: str | None = None):
        self.iteration = iteration
        super().__init__(message or f"non-finite loss at iteration {iteration}")
