import argparse as _argparse
import logging as _logging
import os as _os
import os.path as _ospath
import pytimeparse as _pytimeparse

from datetime import timedelta as _timedelta
from typing import Dict as _Dict, Iterable as _Iterable, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple

from . import _meta
from .. import attack as _attack
from .. import baselines as _baselines
from .. import advtrain as _advtrain
from .. import evaluation as _evaluation
from .. import models as _models
from .. import scenes as _scenes


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


class CmdFlags:
    """Contains the command line flags."""

    config = "--config"
    """A key=value file whose entries become the flag defaults."""

    seed = "--seed"
    """The global seed."""

    out = "--out"
    """The output directory of a command."""

    jobs = "--jobs"
    """The number of worker threads."""

    registry = "--registry"
    """The path of the SQLite run registry."""

    log_level = "--log-level"

    data = "--data"
    """The dataset directory."""

    preset = "--preset"
    train_size = "--train-size"
    test_size = "--test-size"

    family = "--family"
    epochs = "--epochs"
    learning_rate = "--lr"
    momentum = "--momentum"
    batch_size = "--batch-size"
    model_seed = "--model-seed"
    """The seed of the weight initialization, independent of the
    training seed.
    """

    source = "--source"
    """One or more source checkpoints, comma separated."""

    method = "--method"
    """The patch generator, "pap" or a baseline method."""

    direction = "--direction"
    lam = "--lambda"
    alpha = "--alpha"
    steps = "--T"
    attack_epochs = "--attack-epochs"
    size = "--size"
    shape = "--shape"
    rotate = "--rotate"
    no_density_weights = "--no-density-weights"
    region = "--region"
    step_rule = "--step-rule"
    layer = "--layer"
    mu = "--mu"
    kappa = "--kappa"
    ti_size = "--ti-size"
    ti_sigma = "--ti-sigma"

    models = "--models"
    """Target checkpoints as comma separated name=path or path."""

    patches = "--patches"
    """Patch files as comma separated name=path or path."""

    pgd = "--pgd"
    """Add a white-box full-image PGD row to the transfer matrix."""

    pgd_eps = "--pgd-eps"
    pgd_alpha = "--pgd-alpha"
    pgd_iters = "--pgd-iters"

    model = "--model"
    """The pretrained checkpoint to enhance."""

    variant = "--variant"
    mix = "--mix"
    time_budget = "--time-budget"

    matrix = "--matrix"
    """A transfer.json written by attack-eval."""

    gammas = "--gammas"
    patch = "--patch"
    sweep_lambda = "--sweep-lambda"
    sweep_size = "--sweep-size"
    ablate = "--ablate"
    visualize = "--visualize"
    negatives = "--negatives"


class Commands:
    """The sub-command names."""

    gen_data = "gen-data"
    train = "train"
    gen_patch = "gen-patch"
    attack_eval = "attack-eval"
    advtrain = "advtrain"
    report = "report"


PAP_METHOD = "pap"
"""The `--method` of the perceptual patch generator."""


def parse_time_budget(value: str) -> _Optional[_timedelta]:
    """Parse a duration in any format pytimeparse understands.

    Args:
        value (str): The provided value. "off" disables the budget.

    Raises:
        ArgumentTypeError: If the string is not a duration.

    Returns:
        Optional[timedelta]: The duration or None.
    """
    if value == "off":
        return None
    seconds = _pytimeparse.parse(value)
    if seconds is None:
        raise _argparse.ArgumentTypeError(
            f"Could not parse a valid time delta from {value!r}."
        )
    return _timedelta(seconds=seconds)


def positive_int(value: str) -> int:
    """Parse an int >= 1."""
    try:
        result = int(value)
    except ValueError as ve:
        raise _argparse.ArgumentTypeError(f"{value!r} is no int.") from ve
    if result < 1:
        raise _argparse.ArgumentTypeError(f"{value!r} must be >= 1.")
    return result


def float_list(value: str) -> _Tuple[float, ...]:
    """Parse comma separated floats such as "0,1e-4,1e-3"."""
    try:
        return tuple(float(v) for v in split_list(value))
    except ValueError as ve:
        raise _argparse.ArgumentTypeError(
            f"{value!r} is no list of numbers."
        ) from ve


def int_list(value: str) -> _Tuple[int, ...]:
    """Parse comma separated ints such as "6,10,14"."""
    try:
        return tuple(int(v) for v in split_list(value))
    except ValueError as ve:
        raise _argparse.ArgumentTypeError(
            f"{value!r} is no list of ints."
        ) from ve


def split_list(value: str) -> _List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def named_paths(value: str) -> _Tuple[_Tuple[str, str], ...]:
    """Parse "name=path,path2" into (name, path) pairs. A bare path is
    named after its file name without extension.

    Raises:
        ArgumentTypeError: If the list is empty or names repeat.
    """
    pairs: _List[_Tuple[str, str]] = list()
    for item in split_list(value):
        name, sep, path = item.partition("=")
        if not sep:
            path = name
            name = _ospath.splitext(_ospath.basename(path))[0]
        pairs.append((name, path))
    names = [n for n, _ in pairs]
    if len(pairs) == 0:
        raise _argparse.ArgumentTypeError("Expected at least one path.")
    if len(set(names)) != len(names):
        raise _argparse.ArgumentTypeError(f"Duplicate names in {value!r}.")
    return tuple(pairs)


def mix_ratio(value: str) -> _Tuple[int, int]:
    """Parse an "adversarial:clean" ratio such as "1:1"."""
    adv, sep, clean = value.partition(":")
    try:
        if not sep:
            raise ValueError(value)
        return int(adv), int(clean)
    except ValueError as ve:
        raise _argparse.ArgumentTypeError(
            f"Expected a ratio such as 1:1, got {value!r}."
        ) from ve


def _bool_value(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{value!r} is no boolean.")


def ablation(value: str) -> _Tuple[str, _Tuple[object, ...]]:
    """Parse "axis=v1,v2" for the shape, weights and region axes.

    Raises:
        ArgumentTypeError: If the axis is unknown or a value invalid.
    """
    axis, sep, rest = value.partition("=")
    if not sep or axis not in _evaluation.AXIS_FIELDS:
        raise _argparse.ArgumentTypeError(
            f"Expected axis=values with an axis of "
            f"{sorted(_evaluation.AXIS_FIELDS)}, got {value!r}."
        )
    items = split_list(rest)
    try:
        if axis == "lambda":
            return axis, tuple(float(v) for v in items)
        if axis == "size":
            return axis, tuple(int(v) for v in items)
        if axis == "weights":
            return axis, tuple(_bool_value(v) for v in items)
    except ValueError as ve:
        raise _argparse.ArgumentTypeError(str(ve)) from ve
    return axis, tuple(items)


def read_config_file(path: str) -> _Dict[str, str]:
    """Read a key=value file. Blank lines and lines starting with "#"
    are ignored; keys may be written as flags ("--lambda") or plain
    names ("lambda", "batch_size").

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If a line has no "=".

    Returns:
        Dict[str, str]: The raw values by normalized key.
    """
    result: _Dict[str, str] = dict()
    with open(path, "r", encoding="utf-8") as ifi:
        for lineno, line in enumerate(ifi, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value.")
            result[_normalize_key(key)] = value.strip()
    return result


def _normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def _common_parser() -> _argparse.ArgumentParser:
    p = _argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument(
        CmdFlags.config,
        help=(
            "A file of key=value lines providing defaults for any flag. "
            "Flags given on the command line take precedence."
        ),
        metavar="path"
    )
    g.add_argument(
        CmdFlags.seed,
        help=(
            "The global seed. Defaults to the value of the "
            f"{_meta.SEED_ENV} environment variable or 0."
        ),
        type=int,
        default=_os.environ.get(_meta.SEED_ENV, "0")
    )
    g.add_argument(
        CmdFlags.out,
        help="The output directory. It is created if missing.",
        required=True,
        metavar="dir"
    )
    g.add_argument(
        CmdFlags.jobs,
        help="The number of worker threads. Results do not depend on it.",
        type=positive_int,
        default=1
    )
    g.add_argument(
        CmdFlags.registry,
        help=(
            "Record the run and the checksums of its outputs in this "
            "SQLite file and compare them with the previous run of the "
            "same command and configuration."
        ),
        default=None,
        metavar="path"
    )
    g.add_argument(
        CmdFlags.log_level,
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        default="INFO"
    )
    return p


def _attack_parser() -> _argparse.ArgumentParser:
    """Attack flags. Unset flags keep the defaults of the attack config
    of the command.
    """
    p = _argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("attack options")
    g.add_argument(
        CmdFlags.direction, choices=_attack.DIRECTIONS, default=None
    )
    g.add_argument(
        CmdFlags.lam, dest="lam", type=float, default=None,
        help="The weight of the position loss. 0 disables it."
    )
    g.add_argument(CmdFlags.alpha, type=float, default=None)
    g.add_argument(
        CmdFlags.steps, dest="steps", type=positive_int, default=None,
        help="The number of updates per scene visit."
    )
    g.add_argument(
        CmdFlags.attack_epochs, type=positive_int, default=None,
        help="The number of passes over the attack scenes."
    )
    g.add_argument(
        CmdFlags.size, dest="patch_size", type=positive_int, default=None,
        help="The patch side in pixels."
    )
    g.add_argument(CmdFlags.shape, choices=_attack.SHAPES, default=None)
    g.add_argument(
        CmdFlags.rotate, action="store_true", default=False,
        help="Rotate the patch by a random multiple of 90 degrees."
    )
    g.add_argument(
        CmdFlags.no_density_weights, action="store_true", default=False,
        help="Replace the density weights of the scale loss by ones."
    )
    g.add_argument(
        CmdFlags.region,
        choices=(_attack.REGION_PATCH, _attack.REGION_WHOLE),
        default=None,
        help="Where the position loss sums the attention."
    )
    g.add_argument(
        CmdFlags.step_rule,
        choices=(_attack.STEP_RAW, _attack.STEP_SIGN),
        default=None
    )
    g.add_argument(
        CmdFlags.layer, default=None,
        help="The attention layer. Defaults to the model's last feature."
    )
    return p


def _train_options(p: _argparse.ArgumentParser, epochs: int) -> None:
    p.add_argument(CmdFlags.epochs, type=int, default=epochs)
    p.add_argument(
        CmdFlags.learning_rate, dest="lr", type=float,
        default=_models.TrainConfig.learning_rate
    )
    p.add_argument(
        CmdFlags.momentum, type=float, default=_models.TrainConfig.momentum
    )
    p.add_argument(
        CmdFlags.batch_size, type=positive_int,
        default=_models.TrainConfig.batch_size
    )


def _data_option(p: _argparse.ArgumentParser) -> None:
    p.add_argument(
        CmdFlags.data, required=True, metavar="dir",
        help="A dataset directory written by gen-data."
    )


def build_parser() -> _argparse.ArgumentParser:
    """Create the argument parser with all sub-commands."""
    common = _common_parser()
    attack = _attack_parser()
    parser = _argparse.ArgumentParser(
        prog=_meta.PROG_NAME,
        description=(
            "Perceptual adversarial patches against density map crowd "
            "counting models."
        )
    )
    parser.add_argument(
        "--version", action="version",
        version=f"%(prog)s {_meta.VERSION}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        Commands.gen_data, parents=[common],
        help="Render a synthetic dataset."
    )
    p.add_argument(
        CmdFlags.preset, choices=tuple(_scenes.PRESETS),
        default="standard"
    )
    p.add_argument(CmdFlags.train_size, type=int, default=None)
    p.add_argument(CmdFlags.test_size, type=int, default=None)

    p = sub.add_parser(
        Commands.train, parents=[common], help="Train a density model."
    )
    _data_option(p)
    p.add_argument(
        CmdFlags.family, choices=_models.FAMILIES,
        default=_models.MULTI_COLUMN
    )
    _train_options(p, _models.TrainConfig.epochs)
    p.add_argument(CmdFlags.model_seed, type=int, default=0)

    p = sub.add_parser(
        Commands.gen_patch, parents=[common, attack],
        help="Optimize a patch against one or more source models."
    )
    _data_option(p)
    p.add_argument(
        CmdFlags.source, type=named_paths, required=True,
        help=(
            "Source checkpoints. The perceptual patch uses the first, "
            "the ensemble baselines all of them."
        )
    )
    p.add_argument(
        CmdFlags.method, choices=(PAP_METHOD, *_baselines.METHODS),
        default=PAP_METHOD
    )
    p.add_argument(CmdFlags.mu, type=float, default=1.0)
    p.add_argument(CmdFlags.kappa, type=float, default=10.0)
    p.add_argument(
        CmdFlags.ti_size, type=int, default=_baselines.TI_KERNEL_SIZE
    )
    p.add_argument(
        CmdFlags.ti_sigma, type=float, default=_baselines.TI_SIGMA
    )

    p = sub.add_parser(
        Commands.attack_eval, parents=[common],
        help="Evaluate every patch against every model."
    )
    _data_option(p)
    p.add_argument(CmdFlags.models, type=named_paths, required=True)
    p.add_argument(CmdFlags.patches, type=named_paths, default=())
    p.add_argument(CmdFlags.pgd, action="store_true", default=False)
    p.add_argument(
        CmdFlags.pgd_eps, type=float, default=_baselines.PGD_EPSILON
    )
    p.add_argument(
        CmdFlags.pgd_alpha, type=float, default=_baselines.PGD_ALPHA
    )
    p.add_argument(
        CmdFlags.pgd_iters, type=int, default=_baselines.PGD_ITERS
    )

    p = sub.add_parser(
        Commands.advtrain, parents=[common, attack],
        help="Enhance a model by training on patched scenes."
    )
    _data_option(p)
    p.add_argument(CmdFlags.model, required=True, metavar="path")
    p.add_argument(
        CmdFlags.variant, choices=_advtrain.VARIANTS, default=_advtrain.OAT
    )
    _train_options(p, _advtrain.AdvTrainConfig.epochs)
    p.add_argument(
        CmdFlags.mix, type=mix_ratio, default="1:1",
        help="The adversarial to clean ratio of the training set."
    )
    p.add_argument(
        CmdFlags.time_budget, type=parse_time_budget, default="off",
        help=(
            "A soft wall-clock limit, checked after every epoch. Supports "
            "the formats of the pytimeparse package; \"off\" disables it."
        )
    )

    p = sub.add_parser(
        Commands.report, parents=[common, attack],
        help="Curves, ablations, visualizations and negative samples."
    )
    _data_option(p)
    p.add_argument(CmdFlags.matrix, default=None, metavar="path")
    p.add_argument(CmdFlags.gammas, type=float_list, default=None)
    p.add_argument(CmdFlags.source, type=named_paths, default=None)
    p.add_argument(CmdFlags.models, type=named_paths, default=None)
    p.add_argument(CmdFlags.patch, default=None, metavar="path")
    p.add_argument(CmdFlags.sweep_lambda, type=float_list, default=None)
    p.add_argument(CmdFlags.sweep_size, type=int_list, default=None)
    p.add_argument(
        CmdFlags.ablate, type=ablation, action="append", default=[],
        help="An extra ablation such as shape=square,circle,trapezoid."
    )
    p.add_argument(CmdFlags.visualize, type=int, default=0, metavar="n")
    p.add_argument(CmdFlags.negatives, action="store_true", default=False)

    return parser


def _subparsers(
    parser: _argparse.ArgumentParser
) -> _Iterable[_argparse.ArgumentParser]:
    for action in parser._actions:
        if isinstance(action, _argparse._SubParsersAction):
            yield from action.choices.values()


def apply_config_defaults(
    parser: _argparse.ArgumentParser, values: _Dict[str, str]
) -> None:
    """Install config file values as defaults of every sub-command. The
    values stay strings so that argparse applies the flag's type.

    Raises:
        ValueError: If a key matches no flag of any sub-command.
    """
    used = set()
    for sp in _subparsers(parser):
        defaults: _Dict[str, object] = dict()
        for action in sp._actions:
            names = {action.dest} | {
                _normalize_key(o) for o in action.option_strings
            }
            for key in names & set(values):
                raw = values[key]
                if action.nargs == 0:
                    defaults[action.dest] = _bool_value(raw)
                elif isinstance(action, _argparse._AppendAction):
                    convert = action.type or str
                    defaults[action.dest] = [
                        convert(v) for v in raw.split(";") if v.strip()
                    ]
                else:
                    defaults[action.dest] = raw
                # A configured value satisfies a required flag.
                action.required = False
                used.add(key)
        sp.set_defaults(**defaults)
    unknown = sorted(set(values) - used - {"config"})
    if unknown:
        raise ValueError(f"Unknown config keys: {', '.join(unknown)}.")


def parse_args(
    argv: _Optional[_Sequence[str]] = None
) -> _argparse.Namespace:
    """Parse the command line, applying a `--config` file first.

    Raises:
        SystemExit: On invalid arguments, as argparse does.
    """
    pre = _argparse.ArgumentParser(add_help=False)
    pre.add_argument(CmdFlags.config, default=None)
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config is not None:
        try:
            apply_config_defaults(parser, read_config_file(known.config))
        except (OSError, ValueError) as err:
            parser.error(f"Invalid config file {known.config!r}: {err}")
    args = parser.parse_args(argv)
    _logger.debug("Parsed arguments: %s", args)
    return args
