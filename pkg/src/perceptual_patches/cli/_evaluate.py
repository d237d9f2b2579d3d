"""This module implements the attack-eval and report sub-commands."""

import argparse as _argparse
import logging as _logging
import numpy as _np
import os as _os

from typing import Any as _Any, Dict as _Dict, List as _List, \
    Sequence as _Sequence, Tuple as _Tuple

from ._commands import attack_overrides as _attack_overrides, \
    attack_scenes as _attack_scenes, load_model as _load_model, \
    load_models as _load_models, load_split as _load_split, \
    require as _require
from ._run import RunRecorder as _RunRecorder
from .. import attack as _attack
from .. import evaluation as _evaluation
from .. import formats as _formats
from .. import models as _models
from .. import scenes as _scenes
from .. import tools as _tools


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


TRANSFER_CSV = "transfer.csv"
TRANSFER_JSON = "transfer.json"
PER_SCENE_CSV = "per_scene.csv"
NEGATIVES_CSV = "negatives.csv"
CURVES_DIR = "curves"
VIS_DIR = "vis"
DENSITIES_DIR = "densities"


def cmd_attack_eval(args: _argparse.Namespace, run: _RunRecorder) -> None:
    """Evaluate every patch against every model on the test split and
    write the transfer matrix as CSV and JSON plus the per-scene counts.
    """
    models = _load_models(args.models)
    patches = {
        name: _attack.Patch.load(_require(path, "patch"))
        for name, path in args.patches
    }
    test_set = _attack_scenes(_load_split(args.data, _scenes.TEST))
    matrix = _evaluation.run_transfer_eval(
        models, patches, test_set, seed=args.seed, jobs=args.jobs
    )
    if args.pgd:
        cells = {
            name: _evaluation.evaluate_pgd(
                m, test_set, args.pgd_eps, args.pgd_alpha, args.pgd_iters
            )
            for name, m in models.items()
        }
        matrix = matrix.with_source(_evaluation.PGD, cells)
    _evaluation.write_transfer_csv(run.path(TRANSFER_CSV), matrix)
    _tools.write_json(
        run.path(TRANSFER_JSON), _evaluation.matrix_to_json(matrix)
    )
    _evaluation.write_per_scene_csv(run.path(PER_SCENE_CSV), matrix)


def _curves(args: _argparse.Namespace, run: _RunRecorder) -> None:
    obj = _tools.read_json(_require(args.matrix, "transfer matrix"))
    matrix = _evaluation.matrix_from_json(obj)
    direction = args.direction or _attack.INCREASE
    gammas = args.gammas if args.gammas is not None \
        else _evaluation.default_gamma_grid(direction)
    for (source, target), m in matrix.cells.items():
        curve = _evaluation.overestimation_curve(
            m.per_scene, gammas, direction
        )
        _evaluation.write_curve_csv(
            run.path(CURVES_DIR, f"{source}__{target}.csv"), curve
        )


def _ablation_axes(
    args: _argparse.Namespace
) -> _List[_Tuple[str, _Sequence[_Any]]]:
    axes: _List[_Tuple[str, _Sequence[_Any]]] = list()
    if args.sweep_lambda is not None:
        axes.append(("lambda", args.sweep_lambda))
    if args.sweep_size is not None:
        axes.append(("size", args.sweep_size))
    axes.extend(args.ablate)
    return axes


def _ablations(
    args: _argparse.Namespace,
    run: _RunRecorder,
    axes: _Sequence[_Tuple[str, _Sequence[_Any]]]
) -> None:
    if args.source is None:
        raise ValueError("Ablations need a --source checkpoint.")
    source_name, source_path = args.source[0]
    source = _load_model(source_path)
    targets = _load_models(args.models) if args.models is not None \
        else {source_name: source}
    train_set = _attack_scenes(_load_split(args.data, _scenes.TRAIN))
    test_set = _attack_scenes(_load_split(args.data, _scenes.TEST))
    base = _attack.AttackConfig(seed=args.seed, **_attack_overrides(args))
    for axis, values in axes:
        rows = _evaluation.run_ablation(
            source, targets, train_set, test_set, base, axis, values,
            seed=args.seed
        )
        for r in rows:
            if r.attention_final <= r.attention_initial:
                _logger.warning(
                    "%s = %r: the footprint attention did not grow.",
                    axis, r.value
                )
        _evaluation.write_table_csv(
            run.path(f"ablation_{axis}.csv"), [r.to_json() for r in rows]
        )


def _density_map(
    model: _models.DensityModel, image: _np.ndarray
) -> _np.ndarray:
    return model.forward(image).data[0, 0]


def _visualize(args: _argparse.Namespace, run: _RunRecorder) -> None:
    if args.patch is None or args.models is None:
        raise ValueError("Visualizations need --patch and --models.")
    patch = _attack.Patch.load(_require(args.patch, "patch"))
    models = _load_models(args.models)
    test_set = _load_split(args.data, _scenes.TEST)[:args.visualize]
    if len(test_set) == 0:
        return
    placements = _evaluation.scene_placements(
        patch.size, patch.shape, test_set[0].image.shape[1:],
        len(test_set), args.seed
    )
    _os.makedirs(run.path(DENSITIES_DIR), exist_ok=True)
    for name, model in models.items():
        for s, p in zip(test_set, placements):
            adv = _attack.apply_patch(s.image, patch, p)
            dc = _density_map(model, s.image)
            da = _density_map(model, adv)
            _evaluation.write_visualization(
                run.path(VIS_DIR, f"{name}_{s.name}.ppm"),
                _evaluation.side_by_side(s.image, adv, dc, da)
            )
            _formats.write_density(
                run.path(DENSITIES_DIR, f"{name}_{s.name}_clean.papd"), dc
            )
            _formats.write_density(
                run.path(DENSITIES_DIR, f"{name}_{s.name}_adv.papd"), da
            )


def _negatives(args: _argparse.Namespace, run: _RunRecorder) -> None:
    if args.models is None:
        raise ValueError("The negative sample report needs --models.")
    models = _load_models(args.models)
    negatives = [
        s for s in _load_split(args.data, _scenes.TEST) if s.negative
    ]
    if len(negatives) == 0:
        _logger.warning("The test split has no negative samples.")
        return
    scenes = _attack_scenes(negatives)
    rows: _List[_Dict[str, _Any]] = list()
    for name, model in models.items():
        m = _evaluation.evaluate_patch(model, None, scenes, args.seed)
        _logger.info("Negative samples, %s: MAE %.4g", name, m.mae)
        rows.append({"model": name, "n": m.n, "mae": m.mae, "mse": m.mse})
    _evaluation.write_table_csv(run.path(NEGATIVES_CSV), rows)


def cmd_report(args: _argparse.Namespace, run: _RunRecorder) -> None:
    """Write the requested report parts: overestimation curves of a
    transfer matrix, ablation tables, side-by-side visualizations with
    their density dumps and the negative sample errors.

    Raises:
        ValueError: If nothing was requested or a part lacks its inputs.
    """
    axes = _ablation_axes(args)
    if args.matrix is None and not axes and args.visualize <= 0 \
            and not args.negatives:
        raise ValueError("Nothing to report.")
    if args.matrix is not None:
        _curves(args, run)
    if axes:
        _ablations(args, run, axes)
    if args.visualize > 0:
        _visualize(args, run)
    if args.negatives:
        _negatives(args, run)
