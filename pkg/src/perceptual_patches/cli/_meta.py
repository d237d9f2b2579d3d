from .. import __version__ as _version


PROG_NAME = "pap"
"""The name of the console script."""

VERSION = _version

SEED_ENV = "PAP_SEED"
"""The environment variable providing the default seed."""

RUN_FILE = "run.json"
"""The resolved configuration written by every command."""

TIMING_FILE = "timing.json"
"""The wall-clock record written by every command. It is excluded from
the artifact checksums since it differs between reruns.
"""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_MISSING = 2
"""A prerequisite artifact does not exist."""

EXIT_NUMERIC = 3
"""A non-finite value or a diverged optimization."""
