__all__ = [
    "AutodiffError", "ShapeMismatchError", "NonFiniteError",
    "NoTapeError", "TapeConsumedError", "NonScalarError"
]


class AutodiffError(RuntimeError):
    """Base class for errors raised by the differentiable tensor
    engine.
    """
    pass


class ShapeMismatchError(AutodiffError, ValueError):
    """An exception that is raised when the operands of an operation
    have incompatible shapes.
    """
    pass


class NonFiniteError(AutodiffError, ArithmeticError):
    """An exception that is raised when an operation produces NaN or
    infinite values.
    """
    pass


class NoTapeError(AutodiffError):
    """An exception that is raised when `backward` is requested for a
    tensor that was not produced under an active tape.
    """
    pass


class TapeConsumedError(AutodiffError):
    """An exception that is raised when a tape is replayed a second
    time.
    """
    pass


class NonScalarError(AutodiffError, ValueError):
    """An exception that is raised when `backward` is called on a
    tensor holding more than one value.
    """
    pass
