__all__ = ["TrainingDivergedError", "UnknownLayerError"]


class TrainingDivergedError(ArithmeticError):
    """An exception that is raised when the training loss or the
    parameters become NaN or infinite.
    """
    pass


class UnknownLayerError(KeyError):
    """An exception that is raised when a layer name does not belong to
    a model or cannot serve as a starting point of `forward_from`.
    """
    pass
