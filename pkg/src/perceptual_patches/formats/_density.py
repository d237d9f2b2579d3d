"""Density map files: the magic "PAPD1", the height and width as
32-bit little-endian unsigned integers and the values as row-major
32-bit little-endian floats.
"""

import numpy as _np

from . import _binary
from ._exceptions import FormatError as _FormatError
from ..types import PathLike as _PathLike


DENSITY_MAGIC = b"PAPD1"
"""The magic string of density map files."""


def write_density(path: _PathLike, values: _np.ndarray) -> None:
    """Write a 2-D density grid.

    Args:
        path (PathLike): The target file.
        values (ndarray): The grid.

    Raises:
        ValueError: If `values` is not 2-D.
    """
    arr = _np.asarray(values)
    if arr.ndim != 2:
        raise ValueError(f"A density map must be 2-D, got {arr.shape}.")
    with open(path, "wb") as ofi:
        ofi.write(DENSITY_MAGIC)
        _binary.write_u32(ofi, *arr.shape)
        _binary.write_f32(ofi, arr)


def read_density(path: _PathLike) -> _np.ndarray:
    """Read a density map file.

    Args:
        path (PathLike): The file.

    Raises:
        FormatError: If the file is malformed.

    Returns:
        ndarray: The float32 grid.
    """
    with open(path, "rb") as ifi:
        _binary.expect_magic(ifi, DENSITY_MAGIC)
        h, w = _binary.read_u32(ifi, 2)
        values = _binary.read_f32(ifi, h * w).reshape(h, w)
        if ifi.read(1):
            raise _FormatError("Trailing data after the density values.")
    return values
