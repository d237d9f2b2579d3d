import argparse as _argparse
import logging as _logging
import os as _os
import os.path as _ospath

from arrow import Arrow as _Arrow
from contextlib import AbstractContextManager as _AbstractContextManager
from datetime import timedelta as _timedelta
from types import TracebackType as _TracebackType
from typing import Any as _Any, Dict as _Dict, List as _List, \
    Mapping as _Mapping, Optional as _Optional, Type as _Type

from . import _meta
from .. import registry as _registry
from .. import tools as _tools
from .._hashing import hash_config as _hash_config


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


_UNRESOLVED = ("config", "jobs", "log_level", "out", "registry")
"""Arguments that do not change the outputs and stay out of run.json."""


def exit_code_for(exc: _Optional[BaseException]) -> int:
    """Map an exception to the exit code of the command line tool.

    Returns:
        int: 0 without exception, 2 for missing inputs, 3 for
            non-finite values and 1 otherwise.
    """
    if exc is None:
        return _meta.EXIT_OK
    if isinstance(exc, FileNotFoundError):
        return _meta.EXIT_MISSING
    if isinstance(exc, ArithmeticError):
        return _meta.EXIT_NUMERIC
    return _meta.EXIT_FAILURE


def _json_value(value: _Any) -> _Any:
    if isinstance(value, _timedelta):
        return value.total_seconds()
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def resolved_config(args: _argparse.Namespace) -> _Dict[str, _Any]:
    """The JSON form of the parsed arguments that determine the
    outputs.
    """
    return {
        k: _json_value(v) for k, v in sorted(vars(args).items())
        if k not in _UNRESOLVED
    }


class RunRecorder(_AbstractContextManager):
    """Writes run.json on entry and timing.json on exit. With a registry,
    the run and the checksums of all files in the output directory are
    recorded and compared with the previous run of the same command and
    configuration.
    """

    __slots__ = (
        "_command", "_out", "_run_info", "_registry_path", "_engine",
        "_run_id", "_start_time", "timing", "diff"
    )

    def __init__(
        self,
        command: str,
        out: str,
        config: _Mapping[str, _Any],
        registry: _Optional[str] = None
    ) -> None:
        """Initialize a `RunRecorder`.

        Args:
            command (str): The sub-command.
            out (str): The output directory.
            config (Mapping[str, Any]): The resolved configuration.
            registry (Optional[str]): The registry file or None.
        """
        self._command = command
        self._out = out
        self._run_info: _Dict[str, _Any] = {
            "command": command,
            "version": _meta.VERSION,
            "config": dict(config),
        }
        self._registry_path = registry
        self._engine: _Optional[_registry.Engine] = None
        self._run_id: _Optional[int] = None
        self._start_time: _Optional[_Arrow] = None

        self.timing: _Dict[str, _Any] = dict()
        """Extra entries for timing.json, for example phase durations."""

        self.diff: _Optional[_registry.ArtifactDiff] = None
        """The comparison with the previous run, if one was made."""

    @property
    def config_hash(self) -> str:
        return _hash_config(self._run_info)

    @property
    def out(self) -> str:
        return self._out

    def path(self, *parts: str) -> str:
        """A path inside the output directory."""
        return _ospath.join(self._out, *parts)

    def outputs(self) -> _List[str]:
        """All files below the output directory except timing.json, in
        sorted order.
        """
        timing = _ospath.abspath(self.path(_meta.TIMING_FILE))
        found: _List[str] = list()
        for root, dirs, files in _os.walk(self._out):
            dirs.sort()
            for f in sorted(files):
                p = _ospath.join(root, f)
                if _ospath.abspath(p) != timing:
                    found.append(p)
        return found

    def __enter__(self):
        _os.makedirs(self._out, exist_ok=True)
        _logger.debug("Recording %s run in %s.", self._command, self._out)
        _tools.write_json(self.path(_meta.RUN_FILE), self._run_info)
        self._start_time = _Arrow.now()
        if self._registry_path is not None:
            self._engine = _registry.Engine(
                _ospath.abspath(self._registry_path)
            )
            with self._engine.new_session() as session:
                run = session.start_run(
                    self._command, self.config_hash, _meta.VERSION,
                    self._start_time
                )
                self._run_id = run.id
        return self

    def __exit__(
        self,
        exc_type: _Optional[_Type[BaseException]],
        exc_value: _Optional[BaseException],
        traceback: _Optional[_TracebackType]
    ) -> None:
        """Write timing.json and close the registry entry."""
        finished = _Arrow.now()
        started = self._start_time or finished
        timing = {
            "started": started.isoformat(),
            "finished": finished.isoformat(),
            "seconds": (finished - started).total_seconds(),
        }
        timing.update(self.timing)
        _tools.write_json(self.path(_meta.TIMING_FILE), timing)
        engine = self._engine
        if engine is None:
            return
        run_id = self._run_id
        if run_id is None:
            raise AssertionError
        try:
            code = exit_code_for(exc_value)
            with engine.new_session() as session:
                run = session.get_run(run_id)
                if code == _meta.EXIT_OK:
                    session.add_files(run, self._out, self.outputs())
                session.finish_run(run, code, finished)
                if code == _meta.EXIT_OK:
                    self.diff = session.compare_with_previous(run)
        finally:
            engine.dispose()
