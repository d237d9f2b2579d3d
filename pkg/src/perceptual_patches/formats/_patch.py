"""Patch files: the magic "PAPP1", the footprint code as one byte, the
patch side P and channel count C as 32-bit little-endian unsigned
integers and the C*P*P texture values as 32-bit little-endian floats.
"""

import numpy as _np

from typing import Tuple as _Tuple

from . import _binary
from ._exceptions import FormatError as _FormatError
from ..types import PathLike as _PathLike


PATCH_MAGIC = b"PAPP1"
"""The magic string of patch files."""

SHAPE_CODES = {"square": 0, "circle": 1, "trapezoid": 2}
"""Maps footprint names to their byte codes."""

_SHAPE_NAMES = {v: k for k, v in SHAPE_CODES.items()}


def write_patch(path: _PathLike, delta: _np.ndarray, shape: str) -> None:
    """Write a patch texture.

    Args:
        path (PathLike): The target file.
        delta (ndarray): The texture of shape [C, P, P].
        shape (str): The footprint name.

    Raises:
        KeyError: If `shape` is unknown.
        ValueError: If `delta` is not a square 3-D texture.
    """
    arr = _np.asarray(delta)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"Expected a [C, P, P] texture, got {arr.shape}.")
    code = SHAPE_CODES[shape]
    c, p, _ = arr.shape
    with open(path, "wb") as ofi:
        ofi.write(PATCH_MAGIC)
        ofi.write(bytes((code,)))
        _binary.write_u32(ofi, p, c)
        _binary.write_f32(ofi, arr)


def read_patch(path: _PathLike) -> _Tuple[_np.ndarray, str]:
    """Read a patch file.

    Args:
        path (PathLike): The file.

    Raises:
        FormatError: If the file is malformed or the footprint code is
            unknown.

    Returns:
        Tuple[ndarray, str]: The float32 texture of shape [C, P, P] and
            the footprint name.
    """
    with open(path, "rb") as ifi:
        _binary.expect_magic(ifi, PATCH_MAGIC)
        (code,) = _binary.read_exact(ifi, 1)
        shape = _SHAPE_NAMES.get(code)
        if shape is None:
            raise _FormatError(f"Unknown footprint code {code}.")
        p, c = _binary.read_u32(ifi, 2)
        delta = _binary.read_f32(ifi, c * p * p).reshape(c, p, p)
        if ifi.read(1):
            raise _FormatError("Trailing data after the patch values.")
    return delta, shape
