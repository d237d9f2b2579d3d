import logging as _logging
import os.path as _ospath
import sqlalchemy as _sqlalchemy
import sqlalchemy.orm as _orm

from arrow import Arrow as _Arrow
from contextlib import AbstractContextManager as _AbstractContextManager
from dataclasses import dataclass as _dataclass
from sqlalchemy import Engine as _Engine
from types import TracebackType as _TracebackType
from typing import Iterable as _Iterable, Mapping as _Mapping, \
    Optional as _Optional, Tuple as _Tuple, Type as _Type

from . import _exceptions
from ._defs import Artifact as _Artifact, Run as _Run
from .._hashing import hash_file as _hash_file
from ..types import PathLike as _PathLike


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


@_dataclass(frozen=True)
class ArtifactDiff:
    """The difference between the artifacts of two runs."""

    __slots__ = ("added", "removed", "changed")

    added: _Tuple[str, ...]
    """Paths only present in the newer run."""

    removed: _Tuple[str, ...]
    """Paths only present in the older run."""

    changed: _Tuple[str, ...]
    """Paths present in both runs with different checksums."""

    @property
    def identical(self) -> bool:
        return not (self.added or self.removed or self.changed)

    def __str__(self) -> str:
        """Convert the instance to a str for logging."""
        return (
            f"{len(self.added)} added, {len(self.removed)} removed, "
            f"{len(self.changed)} changed"
        )


def diff_checksums(
    old: _Mapping[str, str], new: _Mapping[str, str]
) -> ArtifactDiff:
    """Compare two path-to-checksum maps.

    Args:
        old (Mapping[str, str]): The checksums of the older run.
        new (Mapping[str, str]): The checksums of the newer run.

    Returns:
        ArtifactDiff: The sorted differences.
    """
    added = sorted(set(new) - set(old))
    removed = sorted(set(old) - set(new))
    changed = sorted(p for p in set(old) & set(new) if old[p] != new[p])
    return ArtifactDiff(tuple(added), tuple(removed), tuple(changed))


class Session(_AbstractContextManager):
    """A connection to the run registry. Only usable inside a `with`
    block.
    """

    __slots__ = ("_engine", "_session")

    def __init__(self, engine: _Engine) -> None:
        """Initialize a new Session. The connection starts once
        `__enter__` is called.

        Args:
            engine (Engine): The engine for the connection.
        """
        self._engine = engine
        self._session: _Optional[_orm.Session] = None

    def _ensure_session(self) -> _orm.Session:
        """Return the active sqlalchemy session.

        Raises:
            InactiveSessionError: If the session was not started with
                `__enter__` or was already closed.
        """
        s = self._session
        if s is not None:
            return s
        raise _exceptions.InactiveSessionError(
            "The registry session is not active."
        )

    def __enter__(self):
        self._session = _orm.Session(self._engine, expire_on_commit=False)
        return self

    def __exit__(
        self,
        exc_type: _Optional[_Type[BaseException]],
        exc_value: _Optional[BaseException],
        traceback: _Optional[_TracebackType]
    ) -> None:
        """Close the connection."""
        dbsession = self._session
        if dbsession is None:  # pragma: no cover
            _logger.warning("__exit__ was called, but _session was None.")
            return
        dbsession.__exit__(exc_type, exc_value, traceback)
        self._session = None

    def start_run(
        self,
        command: str,
        config_hash: str,
        version: str,
        started: _Optional[_Arrow] = None
    ) -> _Run:
        """Record the start of a run.

        Args:
            command (str): The sub-command name.
            config_hash (str): The hash of the resolved configuration.
            version (str): The package version.
            started (Optional[Arrow]): The start time. Defaults to now.

        Raises:
            InactiveSessionError: If the session is not active.

        Returns:
            Run: The new run with its id set.
        """
        dbsession = self._ensure_session()
        run = _Run(
            command=command,
            config_hash=config_hash,
            version=version,
            started=started if started is not None else _Arrow.now()
        )
        dbsession.add(run)
        dbsession.commit()
        _logger.info("Registered run %s of %r.", run.id, command)
        return run

    def add_artifacts(
        self, run: _Run, checksums: _Mapping[str, str]
    ) -> int:
        """Attach artifacts to a run in one transaction.

        Args:
            run (Run): The run, attached to this session.
            checksums (Mapping[str, str]): Path to SHA-256.

        Raises:
            InactiveSessionError: If the session is not active.
            IntegrityError: If a path was already recorded for the run.

        Returns:
            int: The number of added artifacts.
        """
        dbsession = self._ensure_session()
        with dbsession.begin_nested():
            for path, digest in checksums.items():
                dbsession.add(_Artifact(run=run, path=path, sha256=digest))
        dbsession.commit()
        return len(checksums)

    def add_files(
        self, run: _Run, root: _PathLike, paths: _Iterable[_PathLike]
    ) -> int:
        """Hash files and attach them to a run, keyed by their path
        relative to `root`.

        Raises:
            FileNotFoundError: If a file does not exist.
            InactiveSessionError: If the session is not active.
            IntegrityError: If a path was already recorded for the run.

        Returns:
            int: The number of added artifacts.
        """
        checksums = {
            _ospath.relpath(p, root).replace(_ospath.sep, "/"):
                _hash_file(p)
            for p in paths
        }
        return self.add_artifacts(run, checksums)

    def finish_run(
        self,
        run: _Run,
        exit_code: int,
        finished: _Optional[_Arrow] = None
    ) -> None:
        """Record the end of a run.

        Raises:
            InactiveSessionError: If the session is not active.
        """
        dbsession = self._ensure_session()
        run.finished = finished if finished is not None else _Arrow.now()
        run.exit_code = exit_code
        dbsession.commit()

    def get_run(self, run_id: int) -> _Run:
        """Fetch a run by id.

        Raises:
            InactiveSessionError: If the session is not active.
            NoResultFound: If there is no such run.
        """
        dbsession = self._ensure_session()
        stmt = _sqlalchemy.select(_Run).where(_Run.id == run_id)
        return dbsession.execute(stmt).scalar_one()

    def previous_run(self, run: _Run) -> _Optional[_Run]:
        """Find the latest successful run before `run` with the same
        command and configuration hash.

        Raises:
            InactiveSessionError: If the session is not active.

        Returns:
            Optional[Run]: The run or None if there is none.
        """
        dbsession = self._ensure_session()
        stmt = _sqlalchemy.select(_Run).where(
            _Run.command == run.command,
            _Run.config_hash == run.config_hash,
            _Run.exit_code == 0,
            _Run.id < run.id
        ).order_by(_Run.id.desc()).limit(1)
        return dbsession.execute(stmt).scalar_one_or_none()

    def compare_with_previous(self, run: _Run) -> _Optional[ArtifactDiff]:
        """Compare the artifacts of a run with its previous run.

        Raises:
            InactiveSessionError: If the session is not active.

        Returns:
            Optional[ArtifactDiff]: The difference or None if there is
                no previous run.
        """
        prev = self.previous_run(run)
        if prev is None:
            _logger.info("No previous run of %r to compare.", run.command)
            return None
        diff = diff_checksums(prev.checksums(), run.checksums())
        if diff.identical:
            _logger.info(
                "Run %s reproduces run %s exactly.", run.id, prev.id
            )
        else:
            _logger.warning(
                "Run %s differs from run %s: %s.", run.id, prev.id, diff
            )
        return diff
