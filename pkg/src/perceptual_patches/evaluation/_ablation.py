"""This module sweeps single attack hyperparameters and evaluates the
resulting patches.
"""

import logging as _logging
import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Callable as _Callable, Dict as _Dict, \
    List as _List, Mapping as _Mapping, Optional as _Optional, \
    Sequence as _Sequence

from ._transfer import clean_counts as _clean_counts, \
    evaluate_patch as _evaluate_patch, \
    scene_placements as _scene_placements
from .. import attack as _attack
from ..models import DensityModel as _DensityModel


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


AXIS_FIELDS = {
    "lambda": "lam",
    "shape": "shape",
    "size": "patch_size",
    "weights": "use_density_weights",
    "region": "attention_region",
}
"""The swept `AttackConfig` field per ablation axis."""

LAMBDA_GRID = (0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
"""The default position loss weights of the lambda sweep."""

PatchGenerator = _Callable[
    [_DensityModel, _Sequence[_attack.AttackScene], _attack.AttackConfig,
     _Optional[_attack.StepCallback]],
    _attack.Patch
]


@_dataclass(frozen=True)
class AblationRow:
    """The errors of one target under one patch variant."""

    __slots__ = (
        "axis", "value", "target", "mae", "mse", "clean_mae",
        "attention_initial", "attention_final"
    )

    axis: str
    value: _Any
    target: str
    mae: float
    mse: float
    clean_mae: float
    attention_initial: float
    """The mean footprint attention of the start texture on the source
    model.
    """

    attention_final: float
    """The mean footprint attention of the optimized texture on the
    source model.
    """

    def to_json(self) -> _Dict[str, _Any]:
        return {name: getattr(self, name) for name in self.__slots__}


def footprint_attention(
    model: _DensityModel,
    image: _np.ndarray,
    patch: _attack.Patch,
    placement: _attack.Placement,
    layer: _Optional[str] = None
) -> float:
    """The attention of `model` summed over the patch footprint of a
    patched image.
    """
    x_adv = _attack.apply_patch(image, patch, placement)
    s = _attack.attention_map(model, x_adv, layer)
    return _attack.position_loss(s, placement.mask).item()


def mean_footprint_attention(
    model: _DensityModel,
    patch: _attack.Patch,
    scenes: _Sequence[_attack.AttackScene],
    seed: int,
    layer: _Optional[str] = None
) -> float:
    """`footprint_attention` averaged over the evaluation placements."""
    placements = _scene_placements(
        patch.size, patch.shape, scenes[0][0].shape[1:], len(scenes), seed
    )
    return float(_np.mean([
        footprint_attention(model, img, patch, p, layer)
        for (img, _), p in zip(scenes, placements)
    ]))


def run_ablation(
    source: _DensityModel,
    targets: _Mapping[str, _DensityModel],
    train_scenes: _Sequence[_attack.AttackScene],
    test_scenes: _Sequence[_attack.AttackScene],
    base: _attack.AttackConfig,
    axis: str,
    values: _Sequence[_Any],
    seed: int = 0,
    generate: _Optional[PatchGenerator] = None
) -> _List[AblationRow]:
    """Generate a patch per value of one hyperparameter and evaluate it
    against every target.

    Args:
        source (DensityModel): The model the patches are optimized on.
        targets (Mapping[str, DensityModel]): The evaluated models,
            usually including the source.
        train_scenes (Sequence[AttackScene]): The optimization scenes.
        test_scenes (Sequence[AttackScene]): The evaluation scenes.
        base (AttackConfig): The config the sweep varies.
        axis (str): One of `AXIS_FIELDS`.
        values (Sequence[Any]): The values of the swept field.
        seed (int, optional): Determines the evaluation placements.
        generate (Optional[PatchGenerator]): Creates the patches. Defaults
            to `attack.pap_generate`.

    Raises:
        KeyError: If the axis is unknown.
        ValueError: If a value is invalid for the field.

    Returns:
        List[AblationRow]: One row per value and target.
    """
    field = AXIS_FIELDS[axis]
    make = generate or _attack.pap_generate
    clean = {
        name: _clean_counts(m, test_scenes) for name, m in targets.items()
    }
    rows: _List[AblationRow] = list()
    for value in values:
        cfg = base.replace(**{field: value})
        _logger.info("Ablation %s = %r", axis, value)
        patch = make(source, train_scenes, cfg, None)
        start = _attack.Patch(
            _attack.start_texture(
                train_scenes, cfg.patch_size, cfg.seed, cfg.direction
            ),
            cfg.shape
        )
        layer = cfg.attention_layer
        att0 = mean_footprint_attention(source, start, test_scenes, seed,
                                        layer)
        att1 = mean_footprint_attention(source, patch, test_scenes, seed,
                                        layer)
        for name, model in targets.items():
            m = _evaluate_patch(model, patch, test_scenes, seed, clean[name])
            c = _evaluate_patch(model, None, test_scenes, seed, clean[name])
            rows.append(AblationRow(
                axis, value, name, m.mae, m.mse, c.mae, att0, att1
            ))
    return rows
