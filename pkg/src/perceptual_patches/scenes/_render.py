"""This module renders synthetic crowd scenes: dark radially shaded
elliptical heads and optional bright clutter on a textured background.
"""

import numpy as _np

from dataclasses import dataclass as _dataclass
from scipy.ndimage import zoom as _zoom
from typing import List as _List, Tuple as _Tuple

from . import _exceptions
from ._config import SceneConfig as _SceneConfig
from ..density import PointSet as _PointSet


_TEXTURE_CELL = 8
"""The side of the coarse noise grid cells of the background."""


@_dataclass(frozen=True)
class Blob:
    """A rendered ellipse."""

    __slots__ = ("cx", "cy", "rx", "ry", "color", "head")

    cx: float
    cy: float
    rx: float
    ry: float
    color: _Tuple[float, float, float]
    head: bool
    """Whether the blob is an annotated head."""


def background(
    height: int, width: int, rng: _np.random.Generator
) -> _np.ndarray:
    """A smooth color texture in [0.45, 0.85] with fine grain."""
    gh = height // _TEXTURE_CELL + 1
    gw = width // _TEXTURE_CELL + 1
    coarse = rng.uniform(0.0, 1.0, (3, gh, gw))
    smooth = _zoom(coarse, (1, _TEXTURE_CELL, _TEXTURE_CELL), order=1)
    smooth = smooth[:, :height, :width]
    grain = rng.normal(0.0, 0.02, (3, height, width))
    return _np.clip(0.45 + 0.4 * smooth + grain, 0.0, 1.0)


def _paint(image: _np.ndarray, blob: Blob) -> None:
    """Alpha-blend an ellipse, opaque at the center and fading to the
    rim.
    """
    _, h, w = image.shape
    r = max(blob.rx, blob.ry)
    y0, y1 = max(int(blob.cy - r), 0), min(int(blob.cy + r) + 2, h)
    x0, x1 = max(int(blob.cx - r), 0), min(int(blob.cx + r) + 2, w)
    ys = _np.arange(y0, y1)[:, None] + 0.5
    xs = _np.arange(x0, x1)[None, :] + 0.5
    q = ((xs - blob.cx) / blob.rx) ** 2 + ((ys - blob.cy) / blob.ry) ** 2
    alpha = _np.sqrt(_np.clip(1.0 - q, 0.0, 1.0))
    color = _np.asarray(blob.color)[:, None, None]
    region = image[:, y0:y1, x0:x1]
    image[:, y0:y1, x0:x1] = region * (1.0 - alpha) + color * alpha


def _place(
    rng: _np.random.Generator,
    cfg: _SceneConfig,
    placed: _List[Blob],
    rx: float,
    ry: float
) -> _Tuple[float, float]:
    """Find a center for an ellipse that keeps it inside the image and
    apart from every placed blob.

    Raises:
        OvercrowdedSceneError: If the retry budget is exhausted.
    """
    r = max(rx, ry)
    for _ in range(cfg.max_retries):
        cx = rng.uniform(r, cfg.width - r)
        cy = rng.uniform(r, cfg.height - r)
        if all(
            (cx - b.cx) ** 2 + (cy - b.cy) ** 2
            >= (r + max(b.rx, b.ry)) ** 2
            for b in placed
        ):
            return cx, cy
    raise _exceptions.OvercrowdedSceneError(
        f"Could not place blob {len(placed) + 1} within "
        f"{cfg.max_retries} attempts."
    )


def render_scene(
    cfg: _SceneConfig,
    rng: _np.random.Generator,
    test: bool = False,
    negative: bool = False
) -> _Tuple[_np.ndarray, _PointSet, _List[Blob]]:
    """Render a scene and report every blob.

    Args:
        cfg (SceneConfig): The scene parameters.
        rng (Generator): The random source.
        test (bool, optional): Whether to use the test radius range.
        negative (bool, optional): Whether to render no heads.

    Raises:
        OvercrowdedSceneError: If a blob cannot be placed.

    Returns:
        Tuple[ndarray, PointSet, List[Blob]]: The float32 [3, H, W]
            image in [0, 1], the head centers and all blobs.
    """
    image = background(cfg.height, cfg.width, rng)
    count = 0 if negative \
        else int(rng.integers(cfg.min_heads, cfg.max_heads + 1))
    lo, hi = cfg.radius_range(test)
    blobs: _List[Blob] = list()
    for _ in range(count):
        rx = float(rng.uniform(lo, hi))
        ry = rx * float(rng.uniform(0.8, 1.2))
        cx, cy = _place(rng, cfg, blobs, rx, ry)
        shade = float(rng.uniform(0.02, 0.2))
        tint = rng.uniform(-0.03, 0.03, 3)
        color = tuple(float(c) for c in _np.clip(shade + tint, 0.0, 1.0))
        blobs.append(Blob(cx, cy, rx, ry, color, True))
    clutter = int(rng.integers(0, cfg.distractors + 1)) \
        if cfg.distractors else 0
    for _ in range(clutter):
        rx = float(rng.uniform(hi, 2.0 * hi))
        ry = rx * float(rng.uniform(0.3, 0.6))
        try:
            cx, cy = _place(rng, cfg, blobs, rx, ry)
        except _exceptions.OvercrowdedSceneError:
            # Clutter is optional; a full scene simply gets less.
            break
        color = tuple(float(c) for c in rng.uniform(0.85, 1.0, 3))
        blobs.append(Blob(cx, cy, rx, ry, color, False))
    for blob in blobs:
        _paint(image, blob)
    points = _np.array(
        [[b.cx, b.cy] for b in blobs if b.head], dtype=_np.float64
    ).reshape(-1, 2)
    return (
        image.astype(_np.float32),
        _PointSet(points, cfg.width, cfg.height),
        blobs
    )


def gen_scene(
    cfg: _SceneConfig,
    rng: _np.random.Generator,
    test: bool = False,
    negative: bool = False
) -> _Tuple[_np.ndarray, _PointSet]:
    """Render a scene, see `render_scene`."""
    image, points, _ = render_scene(cfg, rng, test, negative)
    return image, points
