__all__ = ["MissingArtifactError"]


class MissingArtifactError(FileNotFoundError):
    """Raised when an input a command depends on, such as a dataset,
    checkpoint or patch, does not exist.
    """
    pass
