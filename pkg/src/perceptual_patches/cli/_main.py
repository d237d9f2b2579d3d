import argparse as _argparse
import logging as _logging

from typing import Callable as _Callable, Dict as _Dict, \
    Optional as _Optional, Sequence as _Sequence

from . import _meta
from .. import enable_logging as _enable_logging
from .. import registry as _registry
from ._commands import cmd_advtrain, cmd_gen_data, cmd_gen_patch, \
    cmd_train
from ._evaluate import cmd_attack_eval, cmd_report
from ._flags import Commands as _Commands, parse_args as _parse_args
from ._run import RunRecorder as _RunRecorder, \
    exit_code_for as _exit_code_for, resolved_config as _resolved_config


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


Command = _Callable[[_argparse.Namespace, _RunRecorder], None]

COMMANDS: _Dict[str, Command] = {
    _Commands.gen_data: cmd_gen_data,
    _Commands.train: cmd_train,
    _Commands.gen_patch: cmd_gen_patch,
    _Commands.attack_eval: cmd_attack_eval,
    _Commands.advtrain: cmd_advtrain,
    _Commands.report: cmd_report,
}
"""The implementation of every sub-command."""


def run_command(args: _argparse.Namespace) -> int:
    """Run a parsed command inside a `RunRecorder`.

    Returns:
        int: The exit code.
    """
    recorder = _RunRecorder(
        args.command, args.out, _resolved_config(args), args.registry
    )
    try:
        with recorder:
            COMMANDS[args.command](args, recorder)
    except ArithmeticError:
        _logger.exception("%s failed on a non-finite value.", args.command)
        return _meta.EXIT_NUMERIC
    except FileNotFoundError as fnfe:
        _logger.error("%s", fnfe)
        return _meta.EXIT_MISSING
    except (OSError, KeyError, ValueError) as err:
        _logger.error("%s failed: %s", args.command, err)
        return _exit_code_for(err)
    except RuntimeError as err:
        # scene placement and autodiff failures
        _logger.error(
            "%s failed with %s: %s", args.command, type(err).__name__, err
        )
        return _exit_code_for(err)
    if recorder.diff is not None and not recorder.diff.identical:
        _logger.warning("The outputs differ from the previous run.")
    return _meta.EXIT_OK


def main(argv: _Optional[_Sequence[str]] = None) -> int:
    """The entry point of the console script.

    Args:
        argv (Optional[Sequence[str]]): The arguments without the
            program name. Defaults to `sys.argv[1:]`.

    Returns:
        int: The exit code.
    """
    args = _parse_args(argv)
    level = getattr(_logging, args.log_level)
    _logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    _enable_logging(level)
    if level <= _logging.DEBUG:
        _registry.enable_logging(level)
    return run_command(args)
