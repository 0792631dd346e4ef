"""Exception types shared across the package.

ValidationError covers bad inputs (CLI exit code 2); StageError wraps a
failure inside a named pipeline stage (CLI exit code 3).
"""


class ValidationError(ValueError):
    """Input violates a documented contract (ranges, dimensions, uniqueness)."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
