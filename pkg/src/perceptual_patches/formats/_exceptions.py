__all__ = ["FormatError"]


class FormatError(ValueError):
    """An exception that is raised when a file does not start with the
    expected magic string, is truncated or holds inconsistent values.
    """
    pass
