"""This module rasterizes patch footprints and places them in images."""

import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Optional as _Optional, Tuple as _Tuple

from . import _exceptions
from ._config import SHAPES as _SHAPES


def footprint(shape: str, size: int) -> _np.ndarray:
    """Rasterize a footprint inside its P x P box. A pixel belongs to
    the footprint if its center does.

    - square: every pixel.
    - circle: the inscribed disc.
    - trapezoid: an isosceles trapezoid with the top edge of width P/2
      and the bottom edge of width P.

    Args:
        shape (str): One of "square", "circle" and "trapezoid".
        size (int): The side P.

    Raises:
        ValueError: If the shape is unknown or the size not positive.

    Returns:
        ndarray: The boolean P x P footprint.
    """
    if size < 1:
        raise ValueError(f"The patch size must be positive, got {size}.")
    if shape not in _SHAPES:
        raise ValueError(f"Unknown patch shape {shape!r}.")
    if shape == "square":
        return _np.ones((size, size), dtype=bool)
    centers = _np.arange(size) + 0.5
    half = size / 2.0
    if shape == "circle":
        di = (centers - half)[:, None]
        dj = (centers - half)[None, :]
        return di * di + dj * dj <= half * half
    widths = half + half * centers / size
    return _np.abs(centers[None, :] - half) <= widths[:, None] / 2.0


@_dataclass(frozen=True)
class Placement:
    """Where and how a patch is put into an image."""

    __slots__ = ("top", "left", "rotation", "mask")

    top: int
    """The row of the upper left corner of the P x P box."""

    left: int
    """The column of the upper left corner of the P x P box."""

    rotation: int
    """The number of counter-clockwise quarter turns."""

    mask: _np.ndarray
    """The boolean image-sized footprint M."""


def make_mask(
    shape: str,
    size: int,
    image_hw: _Tuple[int, int],
    position: _Optional[_Tuple[int, int]] = None,
    rng: _Optional[_np.random.Generator] = None,
    rotation: int = 0
) -> Placement:
    """Place a footprint into an image-sized mask.

    Args:
        shape (str): The footprint name.
        size (int): The patch side P.
        image_hw (Tuple[int, int]): The image height and width.
        position (Optional[Tuple[int, int]]): The (row, column) of the
            upper left corner. If None, it is drawn uniformly from all
            positions where the patch fits, using `rng`.
        rng (Optional[Generator]): The random source for the position.
        rotation (int, optional): Quarter turns applied to the
            footprint. Defaults to 0.

    Raises:
        PatchPlacementError: If the patch exceeds the image.
        ValueError: If neither `position` nor `rng` is given.

    Returns:
        Placement: The placement including the mask.
    """
    h, w = image_hw
    if size > h or size > w:
        raise _exceptions.PatchPlacementError(
            f"A {size}px patch does not fit into a {h}x{w} image."
        )
    if position is None:
        if rng is None:
            raise ValueError("Either a position or an rng is required.")
        top = int(rng.integers(0, h - size + 1))
        left = int(rng.integers(0, w - size + 1))
    else:
        top, left = (int(v) for v in position)
        if top < 0 or left < 0 or top + size > h or left + size > w:
            raise _exceptions.PatchPlacementError(
                f"A {size}px patch at ({top}, {left}) exceeds the "
                f"{h}x{w} image."
            )
    rotation %= 4
    mask = _np.zeros((h, w), dtype=bool)
    mask[top:top + size, left:left + size] = _np.rot90(
        footprint(shape, size), rotation
    )
    return Placement(top, left, rotation, mask)


def random_placement(
    shape: str,
    size: int,
    image_hw: _Tuple[int, int],
    rng: _np.random.Generator,
    rotate: bool = False
) -> Placement:
    """Draw a random position and, if requested, a random quarter-turn
    orientation.
    """
    placement = make_mask(shape, size, image_hw, rng=rng)
    if not rotate:
        return placement
    rotation = int(rng.integers(0, 4))
    return make_mask(
        shape, size, image_hw, (placement.top, placement.left),
        rotation=rotation
    )
