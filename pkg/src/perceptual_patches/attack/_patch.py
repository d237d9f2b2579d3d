import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Dict as _Dict, Mapping as _Mapping, \
    Optional as _Optional

from ._config import SHAPES as _SHAPES
from ._losses import compose as _compose
from ._mask import Placement as _Placement, footprint as _footprint
from .. import autodiff as _ad
from .. import formats as _formats
from .. import tools as _tools
from ..models import sidecar_path as _sidecar_path
from ..types import PathLike as _PathLike


@_dataclass(frozen=True)
class Patch:
    """An adversarial texture with its footprint shape."""

    __slots__ = ("delta", "shape")

    delta: _np.ndarray
    """The texture of shape [C, P, P] with values in [0, 1]."""

    shape: str
    """The footprint name."""

    def __post_init__(self) -> None:
        """Validate and freeze the texture.

        Raises:
            ValueError: If the texture is not square, leaves [0, 1] or
                the shape is unknown.
        """
        delta = _np.array(self.delta, dtype=_np.float32)
        if delta.ndim != 3 or delta.shape[1] != delta.shape[2]:
            raise ValueError(
                f"The texture must have shape [C, P, P], got {delta.shape}."
            )
        if not _np.all((delta >= 0.0) & (delta <= 1.0)):
            raise ValueError("Texture values must lie in [0, 1].")
        if self.shape not in _SHAPES:
            raise ValueError(f"Unknown patch shape {self.shape!r}.")
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)

    @property
    def size(self) -> int:
        """The side P."""
        return int(self.delta.shape[1])

    @property
    def channels(self) -> int:
        return int(self.delta.shape[0])

    @property
    def footprint(self) -> _np.ndarray:
        """The boolean P x P footprint."""
        return _footprint(self.shape, self.size)

    def save(
        self,
        path: _PathLike,
        meta: _Optional[_Mapping[str, _Any]] = None
    ) -> None:
        """Write the PAPP1 file and, if given, a sidecar JSON describing
        how the patch was made, usually a config's `to_json()`.
        """
        _formats.write_patch(path, self.delta, self.shape)
        if meta is not None:
            _tools.write_json(_sidecar_path(path), dict(meta))

    @classmethod
    def load(cls, path: _PathLike) -> "Patch":
        """Read a PAPP1 file.

        Raises:
            FormatError: If the file is malformed.
        """
        delta, shape = _formats.read_patch(path)
        return cls(delta, shape)


def load_patch_meta(path: _PathLike) -> _Optional[_Dict[str, _Any]]:
    """Read the sidecar of a patch file, or None if it has none."""
    try:
        return _tools.read_json(_sidecar_path(path))
    except FileNotFoundError:
        return None


def apply_patch(
    image: _np.ndarray, patch: Patch, placement: _Placement
) -> _np.ndarray:
    """Paste a patch into an image without recording gradients.

    Args:
        image (ndarray): The clean image of shape [C, H, W].
        patch (Patch): The patch.
        placement (Placement): Where to put it.

    Raises:
        ShapeMismatchError: If the patch does not fit the image.

    Returns:
        ndarray: The adversarial image of shape [C, H, W].
    """
    _, h, w = image.shape
    canvas = _ad.place_patch(
        _ad.Tensor(patch.delta), placement.top, placement.left, h, w,
        placement.rotation
    )
    return _compose(image, canvas, placement.mask).data[0]

