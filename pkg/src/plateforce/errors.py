"""Shared exception types."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach its target accuracy.

    Carries the best value obtained so far in ``partial`` so callers can
    inspect how far the computation got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
