"""This module builds ground-truth density maps from head annotations
with Gaussian kernels of constant or geometry-adaptive width.
"""

import logging as _logging
import math as _math
import numpy as _np

from scipy.spatial import cKDTree as _cKDTree
from typing import Optional as _Optional

from ._types import DensityMap as _DensityMap, PointSet as _PointSet


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


ADAPTIVE = "adaptive"
"""Kernel width proportional to the mean k-nearest-neighbour distance."""

CONSTANT = "constant"
"""A single kernel width for every head."""

ADAPTIVE_MIN_POINTS = 4
"""Adaptive kernels are chosen by default from this many heads on."""

_MIN_SIGMA = 1e-3
"""Kernels narrower than this degenerate to a single-pixel impulse."""


def knn_avg_distance(points: _PointSet, k: int = 3) -> _np.ndarray:
    """Compute, for each point, the mean Euclidean distance to its
    min(k, N - 1) nearest other points.

    Args:
        points (PointSet): The annotations.
        k (int, optional): The number of neighbours. Defaults to 3.

    Raises:
        ValueError: If fewer than 2 points are given or k < 1.

    Returns:
        ndarray: The per-point mean distances.
    """
    n = len(points)
    if n < 2:
        raise ValueError(f"At least 2 points are required, got {n}.")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}.")
    kk = min(k, n - 1)
    tree = _cKDTree(points.points)
    # The nearest hit of every query is the point itself.
    dist, _ = tree.query(points.points, k=kk + 1)
    return dist[:, 1:].mean(axis=1)


def gaussian_window(sigma: float) -> _np.ndarray:
    """Build a unit-mass 2-D Gaussian truncated at radius ceil(4 sigma).

    Args:
        sigma (float): The standard deviation in pixels.

    Returns:
        ndarray: The (2r + 1) x (2r + 1) float64 window.
    """
    if sigma < _MIN_SIGMA:
        return _np.ones((1, 1))
    r = int(_math.ceil(4.0 * sigma))
    offsets = _np.arange(-r, r + 1, dtype=_np.float64)
    g = _np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    window = _np.outer(g, g)
    return window / window.sum()


def _accumulate(
    grid: _np.ndarray, cx: int, cy: int, window: _np.ndarray
) -> None:
    """Add a window centred at (cx, cy), clipping it at the borders."""
    h, w = grid.shape
    r = window.shape[0] // 2
    top, bottom = cy - r, cy + r + 1
    left, right = cx - r, cx + r + 1
    t0, l0 = max(top, 0), max(left, 0)
    b0, r0 = min(bottom, h), min(right, w)
    if t0 >= b0 or l0 >= r0:  # pragma: no cover
        return
    grid[t0:b0, l0:r0] += window[t0 - top:b0 - top, l0 - left:r0 - left]


def gen_density_map(
    points: _PointSet,
    mode: _Optional[str] = None,
    beta: float = 0.3,
    k: int = 3,
    sigma_const: float = 15.0
) -> _DensityMap:
    """Build the image-resolution ground-truth density map. Every head
    contributes a Gaussian of unit mass centred at the pixel containing
    it. Kernels crossing the border are clipped without renormalizing.

    Args:
        points (PointSet): The annotations.
        mode (Optional[str]): Either `ADAPTIVE` (sigma_i = beta times the
            mean distance to the k nearest heads) or `CONSTANT`. Defaults
            to None, which selects `ADAPTIVE` from `ADAPTIVE_MIN_POINTS`
            heads on and `CONSTANT` otherwise.
        beta (float, optional): The adaptive width factor. Defaults to
            0.3.
        k (int, optional): The neighbour count. Defaults to 3.
        sigma_const (float, optional): The constant width in pixels.
            Defaults to 15.

    Raises:
        ValueError: If `beta` or `sigma_const` is not positive, the mode
            is unknown, or adaptive mode is requested for fewer than 2
            heads.

    Returns:
        DensityMap: The map at scale 1.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}.")
    if sigma_const <= 0:
        raise ValueError(f"sigma_const must be positive, got {sigma_const}.")
    n = len(points)
    if mode is None:
        mode = ADAPTIVE if n >= ADAPTIVE_MIN_POINTS else CONSTANT
    if mode == ADAPTIVE:
        if n < 2:
            raise ValueError(
                f"Adaptive kernels need at least 2 heads, got {n}."
            )
        sigmas = beta * knn_avg_distance(points, k)
    elif mode == CONSTANT:
        sigmas = _np.full(n, float(sigma_const))
    else:
        raise ValueError(f"Unknown kernel mode {mode!r}.")

    grid = _np.zeros((points.image_h, points.image_w), dtype=_np.float64)
    for (x, y), sigma in zip(points.points, sigmas):
        _accumulate(
            grid, int(_math.floor(x)), int(_math.floor(y)),
            gaussian_window(float(sigma))
        )
    _logger.debug(
        "Built a %s density map for %s heads (sum %.6f).",
        mode, n, grid.sum()
    )
    return _DensityMap(grid.astype(_np.float32), 1)


def downsample_preserving_sum(
    density: _DensityMap, factor: int
) -> _DensityMap:
    """Reduce the resolution by summing non-overlapping blocks, so that
    the total mass is unchanged.

    Args:
        density (DensityMap): The map.
        factor (int): The block side.

    Raises:
        ValueError: If `factor` is not positive or does not divide the
            map dimensions.

    Returns:
        DensityMap: The map with `scale` multiplied by `factor`.
    """
    if factor < 1:
        raise ValueError(f"The factor must be positive, got {factor}.")
    h, w = density.shape
    if h % factor != 0 or w % factor != 0:
        raise ValueError(
            f"Map dims {h}x{w} are not divisible by {factor}."
        )
    if factor == 1:
        return density
    blocks = density.values.reshape(h // factor, factor, w // factor, factor)
    values = blocks.sum(axis=(1, 3), dtype=_np.float64)
    return _DensityMap(
        values.astype(density.values.dtype), density.scale * factor
    )
