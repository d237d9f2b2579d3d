import logging as _logging
import os.path as _ospath
import sqlalchemy as _sqlalchemy

from sqlalchemy import Engine as _Engine

from . import _defs
from . import _exceptions
from ._session import Session as _Session
from ..types import PathLike as _PathLike


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


class EngineBase:
    """Wraps a sqlalchemy engine and tracks its disposal."""

    __slots__ = ("_engine", "_disposed")

    def __init__(self, inner: _Engine) -> None:
        """Initialize the `EngineBase`.

        Args:
            inner (Engine): The underlying sqlalchemy engine.
        """
        self._engine = inner
        # sqlalchemy silently reopens a disposed engine.
        self._disposed: bool = False
        """Whether `dispose` was called."""

    def _ensure_not_disposed(self) -> None:
        """Raise if the engine was disposed.

        Raises:
            EngineDisposedError: If the instance was already disposed.
        """
        if self._disposed:
            raise _exceptions.EngineDisposedError(
                "The registry engine was already disposed."
            )

    def dispose(self) -> None:
        """Close the engine."""
        self._engine.dispose()
        self._disposed = True

    def setup_tables(self) -> None:
        """Create the tables if they do not exist.

        Raises:
            DatabaseError: If the database is corrupted.
            EngineDisposedError: If the instance was already disposed.
        """
        self._ensure_not_disposed()
        _defs.create_tables(self._engine)

    def new_session(self) -> _Session:
        """Start a new session.

        Raises:
            EngineDisposedError: If the instance was already disposed.
        """
        self._ensure_not_disposed()
        return _Session(self._engine)


class Engine(EngineBase):
    """The registry engine on top of a SQLite file."""

    __slots__ = ("_path",)

    def __init__(self, path: _PathLike) -> None:
        """Open the registry at `path` and create its tables.

        Args:
            path (PathLike): The absolute file path.

        Raises:
            DatabaseError: If the file is not a registry database.
            IsADirectoryError: If `path` is an existing directory.
            RelativePathError: If `path` is relative.
            ValueError: If `path` is empty.
        """
        spath = str(path)
        if len(spath) == 0:
            raise ValueError("The registry path was empty.")
        # Also rules out ":memory:".
        if not _ospath.isabs(spath):
            raise _exceptions.RelativePathError(
                "The registry path must be absolute."
            )
        if _ospath.isdir(spath):
            raise IsADirectoryError(
                "The registry path points to a directory."
            )
        self._path = spath
        super().__init__(self.create_engine(spath))
        _logger.debug("Opened registry at %s.", spath)
        self.setup_tables()

    @property
    def path(self) -> str:
        return self._path

    @classmethod
    def create_engine(cls, path: str) -> _Engine:
        """Create the inner sqlite engine for a file."""
        return _sqlalchemy.create_engine(f"sqlite:///{path}")
