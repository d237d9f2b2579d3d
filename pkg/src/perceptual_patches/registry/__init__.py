"""An optional SQLite registry of command runs and the checksums of the
files they produce. Comparing a run with the previous run of the same
command and configuration shows whether the output was reproduced.
"""

__all__ = [
    "Run", "Artifact",
    "EngineBase", "Engine",
    "DatabaseError", "IntegrityError", "NoResultFound",
    "InactiveSessionError", "RelativePathError", "EngineDisposedError",
    "enable_logging",
    "Session", "ArtifactDiff", "diff_checksums"
]

from ._defs import Run, Artifact
from ._engine import EngineBase, Engine
from ._exceptions import DatabaseError, IntegrityError, NoResultFound, \
    InactiveSessionError, RelativePathError, EngineDisposedError
from ._logging import enable_logging
from ._session import Session, ArtifactDiff, diff_checksums
