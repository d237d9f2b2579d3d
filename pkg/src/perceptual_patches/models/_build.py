import os as _os

from typing import Any as _Any, Mapping as _Mapping, Optional as _Optional

from ._base import DensityModel as _DensityModel
from ._multi_column import MultiColumnModel as _MultiColumnModel
from ._single_column import SingleColumnModel as _SingleColumnModel
from ._spec import ModelSpec as _ModelSpec, MULTI_COLUMN as _MULTI_COLUMN
from .. import autodiff as _ad
from .. import formats as _formats
from .. import tools as _tools
from ..types import PathLike as _PathLike


def build_model(
    spec: _ModelSpec, dtype=_ad.DEFAULT_DTYPE, zero_head: bool = False
) -> _DensityModel:
    """Create a freshly initialized model.

    Args:
        spec (ModelSpec): The architecture.
        dtype (DTypeLike, optional): The parameter precision.
        zero_head (bool, optional): Whether the final kernel starts at
            zero. Defaults to False.

    Returns:
        DensityModel: The model.
    """
    cls = _MultiColumnModel if spec.family == _MULTI_COLUMN \
        else _SingleColumnModel
    return cls(spec, dtype=dtype, zero_head=zero_head)


def sidecar_path(path: _PathLike) -> str:
    """The path of the JSON file accompanying a binary artifact."""
    return f"{_os.fspath(path)}.json"


def save_checkpoint(
    model: _DensityModel,
    path: _PathLike,
    extra: _Optional[_Mapping[str, _Any]] = None
) -> None:
    """Write the weights and a sidecar JSON holding the model spec.

    Args:
        model (DensityModel): The model.
        path (PathLike): The weight file.
        extra (Optional[Mapping[str, Any]]): Additional sidecar entries,
            for example the adversarial training variant.

    Raises:
        ValueError: If an extra key collides with a spec key.
    """
    sidecar = model.spec.to_json()
    for key, value in (extra or {}).items():
        if key in sidecar:
            raise ValueError(f"Sidecar key {key!r} is reserved.")
        sidecar[key] = value
    _formats.write_weights(path, model.state_dict())
    _tools.write_json(sidecar_path(path), sidecar)


def load_checkpoint(
    path: _PathLike, dtype=_ad.DEFAULT_DTYPE
) -> _DensityModel:
    """Read a model written by `save_checkpoint`.

    Args:
        path (PathLike): The weight file.
        dtype (DTypeLike, optional): The parameter precision.

    Raises:
        FileNotFoundError: If the weights or the sidecar are missing.
        FormatError: If the weight file is malformed.
        KeyError: If the weights do not match the model spec.

    Returns:
        DensityModel: The model.
    """
    spec = _ModelSpec.from_json(_tools.read_json(sidecar_path(path)))
    model = build_model(spec, dtype=dtype)
    model.load_state_dict(_formats.read_weights(path))
    return model
