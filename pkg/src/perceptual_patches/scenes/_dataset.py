"""This module writes and reads synthetic datasets.

A dataset directory holds

- images/<split>_<index>.ppm: the scenes,
- densities/<split>_<index>.papd: the image-resolution ground truth,
- annotations.jsonl: the head centers per image,
- manifest.json: the seed, the config and per-scene checksums.
"""

import concurrent.futures as _futures
import logging as _logging
import numpy as _np
import os as _os

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Dict as _Dict, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple

from ._config import SceneConfig as _SceneConfig
from ._render import gen_scene as _gen_scene
from .. import formats as _formats
from .. import tools as _tools
from .._hashing import hash_file as _hash_file
from ..density import DensityMap as _DensityMap, PointSet as _PointSet, \
    gen_density_map as _gen_density_map, \
    downsample_preserving_sum as _downsample
from ..types import PathLike as _PathLike


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


MANIFEST = "manifest.json"
ANNOTATIONS = "annotations.jsonl"
IMAGES_DIR = "images"
DENSITIES_DIR = "densities"

TRAIN = "train"
TEST = "test"
SPLITS = (TRAIN, TEST)


@_dataclass(frozen=True)
class DatasetScene:
    """A loaded scene."""

    __slots__ = ("name", "split", "image", "points", "density", "negative")

    name: str
    split: str
    image: _np.ndarray
    """The float32 [3, H, W] image in [0, 1]."""

    points: _PointSet
    density: _DensityMap
    """The ground truth at image resolution."""

    negative: bool
    """Whether the scene was rendered without heads."""


def _split_plan(
    cfg: _SceneConfig, seed: int
) -> _List[_Tuple[str, int, bool]]:
    """The (split, index, negative) of every scene. Negative scenes are
    chosen per split with a stream derived from the seed.
    """
    plan: _List[_Tuple[str, int, bool]] = list()
    for code, (split, size) in enumerate(
        ((TRAIN, cfg.train_size), (TEST, cfg.test_size))
    ):
        n_neg = int(round(cfg.negative_fraction * size))
        chosen = set(
            _tools.derive_rng(seed, 100, code)
            .permutation(size)[:n_neg].tolist()
        )
        plan.extend((split, i, i in chosen) for i in range(size))
    return plan


def _write_scene(
    out: str, cfg: _SceneConfig, seed: int, split: str, index: int,
    negative: bool
) -> _Dict[str, _Any]:
    """Render and write one scene and return its manifest entry."""
    code = SPLITS.index(split)
    rng = _tools.derive_rng(seed, code, index)
    image, points = _gen_scene(cfg, rng, split == TEST, negative)
    density = _gen_density_map(points, sigma_const=cfg.sigma_const)
    name = f"{split}_{index:03d}"
    image_rel = f"{IMAGES_DIR}/{name}.ppm"
    density_rel = f"{DENSITIES_DIR}/{name}.papd"
    _formats.write_ppm(_os.path.join(out, image_rel), image)
    density.save(_os.path.join(out, density_rel))
    return {
        "name": name,
        "split": split,
        "negative": negative,
        "image": image_rel,
        "density": density_rel,
        "points": [[float(x), float(y)] for x, y in points.points],
        "count": len(points),
        "sha256": _hash_file(_os.path.join(out, image_rel)),
        "density_sha256": _hash_file(_os.path.join(out, density_rel)),
    }


def gen_dataset(
    cfg: _SceneConfig, seed: int, out_dir: _PathLike, jobs: int = 1
) -> _Dict[str, _Any]:
    """Generate a dataset. Scene i of a split is rendered from a stream
    derived from (seed, split, i), so the output is bit-identical for a
    seed regardless of `jobs`.

    Args:
        cfg (SceneConfig): The scene parameters.
        seed (int): The dataset seed.
        out_dir (PathLike): The output directory, created if missing.
        jobs (int, optional): The number of worker threads.

    Raises:
        OSError: If a file cannot be written.
        OvercrowdedSceneError: If a scene cannot be rendered.

    Returns:
        Dict[str, Any]: The manifest.
    """
    out = _os.fspath(out_dir)
    for sub in (IMAGES_DIR, DENSITIES_DIR):
        _os.makedirs(_os.path.join(out, sub), exist_ok=True)
    plan = _split_plan(cfg, seed)

    def job(item: _Tuple[str, int, bool]) -> _Dict[str, _Any]:
        return _write_scene(out, cfg, seed, *item)

    if jobs <= 1:
        entries = [job(item) for item in plan]
    else:
        with _futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(job, plan))

    _formats.write_annotations(
        _os.path.join(out, ANNOTATIONS),
        [
            _formats.AnnotationRecord(e["image"], _np.array(e["points"]))
            for e in entries
        ]
    )
    manifest = {"seed": seed, "config": cfg.to_json(), "scenes": entries}
    _tools.write_json(_os.path.join(out, MANIFEST), manifest)
    _logger.info("Wrote %s scenes to %s.", len(entries), out)
    return manifest


def read_manifest(root: _PathLike) -> _Dict[str, _Any]:
    """Read the manifest of a dataset directory.

    Raises:
        FileNotFoundError: If there is no manifest.
    """
    return _tools.read_json(_os.path.join(_os.fspath(root), MANIFEST))


def load_dataset(
    root: _PathLike, split: _Optional[str] = None, verify: bool = False
) -> _List[DatasetScene]:
    """Load the scenes of a dataset directory.

    Args:
        root (PathLike): The dataset directory.
        split (Optional[str]): "train", "test" or None for all scenes.
        verify (bool, optional): Whether to compare the checksums.

    Raises:
        FileNotFoundError: If a file is missing.
        FormatError: If a file is malformed or, with `verify`, its
            checksum differs from the manifest.
        ValueError: If the split is unknown.

    Returns:
        List[DatasetScene]: The scenes in manifest order.
    """
    if split is not None and split not in SPLITS:
        raise ValueError(f"Unknown split {split!r}.")
    base = _os.fspath(root)
    manifest = read_manifest(base)
    cfg = _SceneConfig.from_json(manifest["config"])
    scenes: _List[DatasetScene] = list()
    for e in manifest["scenes"]:
        if split is not None and e["split"] != split:
            continue
        image_path = _os.path.join(base, e["image"])
        density_path = _os.path.join(base, e["density"])
        if verify:
            for path, key in ((image_path, "sha256"),
                              (density_path, "density_sha256")):
                if _hash_file(path) != e[key]:
                    raise _formats.FormatError(
                        f"Checksum mismatch for {path}."
                    )
        image = _formats.read_ppm(image_path)
        scenes.append(DatasetScene(
            e["name"],
            e["split"],
            image,
            _PointSet(_np.array(e["points"]), cfg.width, cfg.height),
            _DensityMap.load(density_path),
            bool(e["negative"]),
        ))
    return scenes


def as_samples(
    scenes: _Sequence[DatasetScene], stride: int = 1
) -> _List[_Tuple[_np.ndarray, _DensityMap]]:
    """Pair images with their ground truth pooled to a model's output
    stride.
    """
    return [(s.image, _downsample(s.density, stride)) for s in scenes]
