"""Exception types shared across the pipeline."""


class QspError(Exception):
    """Base class for all library errors."""


class InputValidationError(QspError):
    """The input document or target violates a stated precondition."""


class DegenerateInputError(InputValidationError):
    """Truncation removed every coefficient; nothing left to factor."""


class PrecisionInsufficientError(QspError):
    """A stage failed a certification gate at the current working precision.

    The adaptive driver reacts by doubling the bit count and rerunning.
    """

    def __init__(self, stage: str, detail: str = ""):
        self.stage = stage
        self.detail = detail
        super().__init__(f"{stage}: {detail}" if detail else stage)


class PrecisionCapExceededError(QspError):
    """Doubling reached the worst-case bit cap without a passing run."""

    def __init__(self, message: str, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class NotParityConstrainedError(QspError):
    """Projectors stray from the Bloch equator; no angle form exists."""
