"""The `pap` command line tool. Every sub-command writes its outputs,
a run.json with the resolved configuration and a timing.json into the
directory given by --out.
"""

__all__ = [
    "main", "run_command", "COMMANDS",
    "CmdFlags", "Commands", "build_parser", "parse_args",
    "parse_time_budget", "read_config_file", "apply_config_defaults",
    "RunRecorder", "exit_code_for", "resolved_config",
    "MissingArtifactError",
    "PROG_NAME", "SEED_ENV", "RUN_FILE", "TIMING_FILE",
    "EXIT_OK", "EXIT_FAILURE", "EXIT_MISSING", "EXIT_NUMERIC"
]

from ._exceptions import MissingArtifactError
from ._flags import CmdFlags, Commands, build_parser, parse_args, \
    parse_time_budget, read_config_file, apply_config_defaults
from ._main import main, run_command, COMMANDS
from ._meta import PROG_NAME, SEED_ENV, RUN_FILE, TIMING_FILE, EXIT_OK, \
    EXIT_FAILURE, EXIT_MISSING, EXIT_NUMERIC
from ._run import RunRecorder, exit_code_for, resolved_config
