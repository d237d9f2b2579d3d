__all__ = ["PatchPlacementError", "AttackDivergedError"]


class PatchPlacementError(ValueError):
    """An exception that is raised when a patch does not fit into the
    image at the requested position.
    """
    pass


class AttackDivergedError(ArithmeticError):
    """An exception that is raised when an attack loss or gradient
    becomes NaN or infinite.
    """
    pass
