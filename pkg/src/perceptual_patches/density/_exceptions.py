__all__ = ["AnnotationError"]


class AnnotationError(ValueError):
    """An exception that is raised when head annotations are invalid,
    for example when a point lies outside of the image.
    """
    pass
