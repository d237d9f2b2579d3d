"""This module implements the data, training and patch sub-commands."""

import argparse as _argparse
import dataclasses as _dataclasses
import logging as _logging
import os.path as _ospath

from typing import Any as _Any, Dict as _Dict, List as _List, \
    Sequence as _Sequence, Tuple as _Tuple

from . import _exceptions
from ._flags import PAP_METHOD as _PAP_METHOD
from ._run import RunRecorder as _RunRecorder
from .. import advtrain as _advtrain
from .. import attack as _attack
from .. import baselines as _baselines
from .. import evaluation as _evaluation
from .. import models as _models
from .. import scenes as _scenes
from .. import tools as _tools


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


MODEL_FILE = "model.papw"
PATCH_FILE = "patch.papp"
LOSSES_FILE = "losses.json"
HISTORY_FILE = "history.csv"


def require(path: str, what: str) -> str:
    """Check that an input exists.

    Raises:
        MissingArtifactError: If it does not.

    Returns:
        str: `path`.
    """
    if not _ospath.exists(path):
        raise _exceptions.MissingArtifactError(
            f"The {what} {path!r} does not exist."
        )
    return path


def load_split(data: str, split: str) -> _List[_scenes.DatasetScene]:
    """Load one split of a dataset directory.

    Raises:
        MissingArtifactError: If the dataset does not exist.
    """
    require(_ospath.join(data, _scenes.MANIFEST), "dataset manifest")
    return _scenes.load_dataset(data, split)


def load_model(path: str) -> _models.DensityModel:
    """Load a checkpoint written by train or advtrain.

    Raises:
        MissingArtifactError: If the weights or the sidecar are missing.
    """
    require(path, "checkpoint")
    require(_models.sidecar_path(path), "checkpoint sidecar")
    return _models.load_checkpoint(path)


def load_models(
    named: _Sequence[_Tuple[str, str]]
) -> _Dict[str, _models.DensityModel]:
    return {name: load_model(path) for name, path in named}


def attack_scenes(
    scenes: _Sequence[_scenes.DatasetScene]
) -> _List[_attack.AttackScene]:
    return [(s.image, s.density) for s in scenes]


def attack_overrides(args: _argparse.Namespace) -> _Dict[str, _Any]:
    """The `AttackConfig` fields given on the command line."""
    mapping = {
        "direction": "direction",
        "lam": "lam",
        "alpha": "alpha",
        "steps": "steps",
        "attack_epochs": "epochs",
        "patch_size": "patch_size",
        "shape": "shape",
        "region": "attention_region",
        "step_rule": "step_rule",
        "layer": "attention_layer",
    }
    result = {
        field: getattr(args, dest) for dest, field in mapping.items()
        if getattr(args, dest, None) is not None
    }
    if getattr(args, "rotate", False):
        result["rotate"] = True
    if getattr(args, "no_density_weights", False):
        result["use_density_weights"] = False
    return result


def cmd_gen_data(args: _argparse.Namespace, run: _RunRecorder) -> None:
    """Render a dataset into the output directory."""
    cfg = _scenes.preset(args.preset)
    if args.train_size is not None:
        cfg = cfg.replace(train_size=args.train_size)
    if args.test_size is not None:
        cfg = cfg.replace(test_size=args.test_size)
    _scenes.gen_dataset(cfg, args.seed, run.out, jobs=args.jobs)


def cmd_train(args: _argparse.Namespace, run: _RunRecorder) -> None:
    """Train a model and write model.papw with its sidecar and the loss
    curve.
    """
    train_set = load_split(args.data, _scenes.TRAIN)
    test_set = load_split(args.data, _scenes.TEST)
    model = _models.build_model(
        _models.ModelSpec(args.family, seed=args.model_seed)
    )
    cfg = _models.TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        momentum=args.momentum,
        seed=args.seed,
        batch_size=args.batch_size,
    )
    stride = model.output_stride
    result = _models.train(
        model, _scenes.as_samples(train_set, stride), cfg
    )
    test_loss = _models.evaluate_loss(
        model, _scenes.as_samples(test_set, stride)
    )
    _logger.info("Test loss %.6g", test_loss)
    _models.save_checkpoint(
        model, run.path(MODEL_FILE), {"train": cfg.to_json()}
    )
    _tools.write_json(run.path(LOSSES_FILE), {
        "losses": list(result.losses),
        "test_loss": test_loss,
    })


def _record_to_row(record: _attack.StepRecord) -> _Dict[str, _Any]:
    return _dataclasses.asdict(record)


def _baseline_config(
    args: _argparse.Namespace
) -> _baselines.BaselineConfig:
    names = {f.name for f in _dataclasses.fields(_baselines.BaselineConfig)}
    given = {
        k: v for k, v in attack_overrides(args).items() if k in names
    }
    return _baselines.BaselineConfig(
        method=args.method,
        seed=args.seed,
        mu=args.mu,
        kappa=args.kappa,
        ti_kernel_size=args.ti_size,
        ti_sigma=args.ti_sigma,
        **given
    )


def cmd_gen_patch(args: _argparse.Namespace, run: _RunRecorder) -> None:
    """Generate a patch and write patch.papp with a sidecar describing
    the method and its config. The perceptual patch also writes its step
    history and the footprint attention before and after optimization.
    """
    sources = load_models(args.source)
    source_names = list(sources)
    train_set = attack_scenes(load_split(args.data, _scenes.TRAIN))
    meta: _Dict[str, _Any] = {"method": args.method, "source": source_names}

    if args.method == _PAP_METHOD:
        model = sources[source_names[0]]
        cfg = _attack.AttackConfig(seed=args.seed, **attack_overrides(args))
        history: _List[_attack.StepRecord] = list()
        patch = _attack.pap_generate(model, train_set, cfg, history.append)
        _evaluation.write_table_csv(
            run.path(HISTORY_FILE), [_record_to_row(r) for r in history]
        )
        test_set = attack_scenes(load_split(args.data, _scenes.TEST))
        start = _attack.Patch(
            _attack.start_texture(
                train_set, cfg.patch_size, cfg.seed, cfg.direction
            ),
            cfg.shape
        )
        before = _evaluation.mean_footprint_attention(
            model, start, test_set, args.seed, cfg.attention_layer
        )
        after = _evaluation.mean_footprint_attention(
            model, patch, test_set, args.seed, cfg.attention_layer
        )
        if cfg.direction == _attack.INCREASE and after <= before:
            _logger.warning(
                "The footprint attention did not grow: %.6g -> %.6g.",
                before, after
            )
        meta.update({
            "config": cfg.to_json(),
            "attention_initial": before,
            "attention_final": after,
        })
    else:
        bcfg = _baseline_config(args)
        patch = _baselines.generate_baseline_patch(
            list(sources.values()), train_set, bcfg
        )
        meta["config"] = bcfg.to_json()

    patch.save(run.path(PATCH_FILE), meta)
    _logger.info("Wrote %s patch of size %s.", args.method, patch.size)


def cmd_advtrain(args: _argparse.Namespace, run: _RunRecorder) -> None:
    """Adversarially train a copy of a checkpoint."""
    model = load_model(args.model)
    train_set = load_split(args.data, _scenes.TRAIN)
    attack_cfg = _advtrain.default_attack(args.variant).replace(
        seed=args.seed, **attack_overrides(args)
    )
    mix_adv, mix_clean = args.mix
    cfg = _advtrain.AdvTrainConfig(
        variant=args.variant,
        epochs=args.epochs,
        mix_adv=mix_adv,
        mix_clean=mix_clean,
        train=_models.TrainConfig(
            learning_rate=args.lr,
            momentum=args.momentum,
            seed=args.seed,
            batch_size=args.batch_size,
        ),
        attack=attack_cfg,
        seed=args.seed,
        time_budget=args.time_budget,
        jobs=args.jobs,
    )
    result = _advtrain.adversarial_train(
        model, _scenes.as_samples(train_set, model.output_stride), cfg
    )
    _models.save_checkpoint(
        result.model, run.path(MODEL_FILE),
        {"variant": result.variant, "advtrain": cfg.to_json()}
    )
    _tools.write_json(run.path(LOSSES_FILE), {
        "losses": list(result.losses),
        "stopped_early": result.stopped_early,
    })
    run.timing["training_seconds"] = result.wall_clock.total_seconds()
