"""This module evaluates patches across source and target models."""

import concurrent.futures as _futures
import logging as _logging
import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Dict as _Dict, List as _List, Mapping as _Mapping, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple

from ._metrics import Metrics as _Metrics, SceneCounts as _SceneCounts
from .. import attack as _attack
from .. import baselines as _baselines
from .. import tools as _tools
from ..models import DensityModel as _DensityModel


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


CLEAN = "clean"
"""The source name of the row of unpatched predictions."""


@_dataclass(frozen=True)
class TransferRow:
    """One line of the transfer table."""

    __slots__ = ("source", "target", "mae", "mse", "n")

    source: str
    target: str
    mae: float
    mse: float
    n: int


@_dataclass(frozen=True)
class TransferMatrix:
    """Count errors of every target model under the patch of every
    source model, plus the clean errors of every target. Cells whose
    source and target coincide are white-box results.
    """

    __slots__ = ("sources", "targets", "clean", "cells")

    sources: _Tuple[str, ...]
    targets: _Tuple[str, ...]

    clean: _Mapping[str, _Metrics]
    """The clean metrics per target."""

    cells: _Mapping[_Tuple[str, str], _Metrics]
    """The metrics per (source, target)."""

    def cell(self, source: str, target: str) -> _Metrics:
        """The metrics of a target under a source's patch, or the clean
        metrics if `source` is "clean".

        Raises:
            KeyError: If the pair does not exist.
        """
        if source == CLEAN:
            return self.clean[target]
        return self.cells[(source, target)]

    def rows(self) -> _List[TransferRow]:
        """The clean row followed by the source rows, targets in
        column order.
        """
        out: _List[TransferRow] = list()
        for source in (CLEAN,) + self.sources:
            for target in self.targets:
                m = self.cell(source, target)
                out.append(TransferRow(source, target, m.mae, m.mse, m.n))
        return out

    def with_source(
        self, source: str, cells: _Mapping[str, _Metrics]
    ) -> "TransferMatrix":
        """Append a source row.

        Args:
            source (str): The row name.
            cells (Mapping[str, Metrics]): The metrics per target.

        Raises:
            KeyError: If a target is missing.
            ValueError: If the source name is taken.

        Returns:
            TransferMatrix: A new matrix.
        """
        if source == CLEAN or source in self.sources:
            raise ValueError(f"The source {source!r} already exists.")
        merged = dict(self.cells)
        for t in self.targets:
            merged[(source, t)] = cells[t]
        return TransferMatrix(
            self.sources + (source,), self.targets, self.clean, merged
        )


def scene_placements(
    patch_size: int,
    shape: str,
    image_hw: _Tuple[int, int],
    count: int,
    seed: int
) -> _List[_attack.Placement]:
    """The evaluation placements, one per scene, derived from (seed,
    scene index) so every patch is tested at the same positions.
    """
    return [
        _attack.random_placement(
            shape, patch_size, image_hw, _tools.derive_rng(seed, 5, i)
        )
        for i in range(count)
    ]


def clean_counts(
    model: _DensityModel, scenes: _Sequence[_attack.AttackScene]
) -> _np.ndarray:
    """The predicted count of every clean scene."""
    return _np.array([model.count(img) for img, _ in scenes])


def evaluate_patch(
    model: _DensityModel,
    patch: _Optional[_attack.Patch],
    scenes: _Sequence[_attack.AttackScene],
    seed: int = 0,
    clean: _Optional[_Sequence[float]] = None
) -> _Metrics:
    """Count errors of a model on patched scenes.

    Args:
        model (DensityModel): The target model.
        patch (Optional[Patch]): The patch. None evaluates the clean
            scenes.
        scenes (Sequence[AttackScene]): The test scenes.
        seed (int, optional): Determines the placements.
        clean (Optional[Sequence[float]]): Precomputed clean counts.

    Raises:
        ShapeMismatchError: If the model rejects the image dims.
        ValueError: If `scenes` is empty.

    Returns:
        Metrics: The errors of the patched predictions.
    """
    if len(scenes) == 0:
        raise ValueError("No scenes to evaluate.")
    if clean is None:
        clean = clean_counts(model, scenes)
    if patch is None:
        adv = list(clean)
    else:
        placements = scene_placements(
            patch.size, patch.shape, scenes[0][0].shape[1:], len(scenes),
            seed
        )
        adv = [
            model.count(_attack.apply_patch(img, patch, p))
            for (img, _), p in zip(scenes, placements)
        ]
    per_scene = [
        _SceneCounts(i, gt.count, float(c), float(a))
        for i, ((_, gt), c, a) in enumerate(zip(scenes, clean, adv))
    ]
    return _Metrics.from_counts(per_scene, adversarial=True)


def run_transfer_eval(
    models: _Mapping[str, _DensityModel],
    patches: _Mapping[str, _attack.Patch],
    scenes: _Sequence[_attack.AttackScene],
    seed: int = 0,
    jobs: int = 1
) -> TransferMatrix:
    """Evaluate every patch against every model.

    Args:
        models (Mapping[str, DensityModel]): The target models by name.
        patches (Mapping[str, Patch]): The patches by source name.
        scenes (Sequence[AttackScene]): The test scenes.
        seed (int, optional): Determines the placements.
        jobs (int, optional): The number of worker threads.

    Raises:
        ShapeMismatchError: If a model rejects the image dims.
        ValueError: If `models` or `scenes` is empty.

    Returns:
        TransferMatrix: The matrix.
    """
    if len(models) == 0:
        raise ValueError("At least one target model is required.")
    targets = tuple(models)
    sources = tuple(patches)
    clean_by_target: _Dict[str, _np.ndarray] = {
        t: clean_counts(m, scenes) for t, m in models.items()
    }
    clean = {
        t: evaluate_patch(models[t], None, scenes, seed, clean_by_target[t])
        for t in targets
    }

    def job(pair: _Tuple[str, str]) -> _Metrics:
        source, target = pair
        m = evaluate_patch(
            models[target], patches[source], scenes, seed,
            clean_by_target[target]
        )
        _logger.info(
            "%s -> %s: MAE %.4g, MSE %.4g", source, target, m.mae, m.mse
        )
        return m

    pairs = [(s, t) for s in sources for t in targets]
    if jobs <= 1:
        results = [job(p) for p in pairs]
    else:
        with _futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(job, pairs))
    return TransferMatrix(sources, targets, clean, dict(zip(pairs, results)))


PGD = "pgd"
"""The source name of the full-image PGD row."""


def evaluate_pgd(
    model: _DensityModel,
    scenes: _Sequence[_attack.AttackScene],
    eps: float = _baselines.PGD_EPSILON,
    alpha: float = _baselines.PGD_ALPHA,
    iters: int = _baselines.PGD_ITERS,
    clean: _Optional[_Sequence[float]] = None
) -> _Metrics:
    """Count errors of a model under a white-box L-infinity attack on
    the whole image, the imperceptible counterpart of a patch.

    Raises:
        ValueError: If `scenes` is empty or a PGD parameter is invalid.

    Returns:
        Metrics: The errors of the attacked predictions.
    """
    if len(scenes) == 0:
        raise ValueError("No scenes to evaluate.")
    if clean is None:
        clean = clean_counts(model, scenes)
    s = model.output_stride
    per_scene: _List[_SceneCounts] = list()
    for i, ((img, gt), c) in enumerate(zip(scenes, clean)):
        _, h, w = img.shape
        target = _attack.align_ground_truth(gt, (h // s, w // s))
        x_adv = _baselines.pgd_linf(model, img, target, eps, alpha, iters)
        per_scene.append(
            _SceneCounts(i, gt.count, float(c), model.count(x_adv))
        )
    return _Metrics.from_counts(per_scene, adversarial=True)
