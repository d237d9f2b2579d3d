__all__ = ["OvercrowdedSceneError"]


class OvercrowdedSceneError(RuntimeError):
    """An exception that is raised when heads cannot be placed without
    overlap within the retry budget.
    """
    pass
