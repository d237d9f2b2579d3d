__all__ = [
    "DatabaseError", "IntegrityError", "NoResultFound",
    "InactiveSessionError",
    "RelativePathError",
    "EngineDisposedError"
]

from sqlalchemy.exc import DatabaseError, IntegrityError, NoResultFound


class InactiveSessionError(RuntimeError):
    """Raised when a registry session is used outside of its `with`
    block.
    """
    pass


class RelativePathError(OSError):
    """Raised when the registry file is given as a relative path."""
    pass


class EngineDisposedError(RuntimeError):
    """Raised when a registry `Engine` is used after `dispose`."""
    pass
