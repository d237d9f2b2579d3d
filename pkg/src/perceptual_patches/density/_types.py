import numpy as _np

from dataclasses import dataclass as _dataclass

from . import _exceptions
from .. import formats as _formats
from ..types import PathLike as _PathLike


@_dataclass(frozen=True)
class PointSet:
    """The head centers annotating a scene."""

    __slots__ = ("points", "image_w", "image_h")

    points: _np.ndarray
    """The [N, 2] array of (x, y) pixel coordinates."""

    image_w: int
    """The image width in pixels."""

    image_h: int
    """The image height in pixels."""

    def __post_init__(self) -> None:
        """Normalize and validate the points.

        Raises:
            AnnotationError: If the points are not (x, y) pairs or a
                point lies outside [0, image_w) x [0, image_h).
            ValueError: If an image dimension is not positive.
        """
        if self.image_w <= 0 or self.image_h <= 0:
            raise ValueError(
                f"Invalid image size {self.image_w}x{self.image_h}."
            )
        pts = _np.array(self.points, dtype=_np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise _exceptions.AnnotationError(
                f"Points must have shape [N, 2], got {pts.shape}."
            )
        if not _np.isfinite(pts).all():
            raise _exceptions.AnnotationError("Points must be finite.")
        x, y = pts[:, 0], pts[:, 1]
        inside = (x >= 0) & (x < self.image_w) & (y >= 0) & \
            (y < self.image_h)
        if not inside.all():
            bad = pts[~inside][0]
            raise _exceptions.AnnotationError(
                f"Point ({bad[0]}, {bad[1]}) lies outside the "
                f"{self.image_w}x{self.image_h} image."
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def shifted(self, dx: float, dy: float) -> "PointSet":
        """Create a copy with every point moved by an offset.

        Raises:
            AnnotationError: If a moved point leaves the image.
        """
        return PointSet(
            self.points + _np.array([dx, dy]), self.image_w, self.image_h
        )


@_dataclass(frozen=True)
class DensityMap:
    """A non-negative grid whose sum estimates a head count."""

    __slots__ = ("values", "scale")

    values: _np.ndarray
    """The 2-D grid."""

    scale: int
    """The number of image pixels per cell along each axis."""

    def __post_init__(self) -> None:
        """Validate the grid.

        Raises:
            ValueError: If the grid is not 2-D, has negative entries or
                the scale is not positive.
        """
        values = _np.asarray(self.values)
        if values.ndim != 2:
            raise ValueError(
                f"A density map must be 2-D, got shape {values.shape}."
            )
        if (values < 0).any():
            raise ValueError("Density values must be non-negative.")
        if self.scale < 1:
            raise ValueError(f"Invalid scale {self.scale}.")
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        """The grid dimensions."""
        return self.values.shape

    @property
    def count(self) -> float:
        """The sum of the grid, accumulated in 64 bits."""
        return float(self.values.sum(dtype=_np.float64))

    def save(self, path: _PathLike) -> None:
        """Write the grid as a density map file."""
        _formats.write_density(path, self.values)

    @classmethod
    def load(cls, path: _PathLike, scale: int = 1) -> "DensityMap":
        """Read a density map file.

        Raises:
            FormatError: If the file is malformed.
        """
        return cls(_formats.read_density(path), scale)
