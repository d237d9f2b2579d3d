"""Weight files: the magic "PAPW1" followed by one record per
parameter, each holding the UTF-8 name with its length, the rank, the
dimensions and the values as 32-bit little-endian floats.
"""

import numpy as _np

from typing import Dict as _Dict, Mapping as _Mapping

from . import _binary
from ._exceptions import FormatError as _FormatError
from ..types import PathLike as _PathLike


WEIGHTS_MAGIC = b"PAPW1"
"""The magic string of weight files."""


def write_weights(
    path: _PathLike, params: _Mapping[str, _np.ndarray]
) -> None:
    """Write named parameter arrays in insertion order.

    Args:
        path (PathLike): The target file.
        params (Mapping[str, ndarray]): The parameters.
    """
    with open(path, "wb") as ofi:
        ofi.write(WEIGHTS_MAGIC)
        for name, values in params.items():
            encoded = name.encode("utf-8")
            _binary.write_u32(ofi, len(encoded))
            ofi.write(encoded)
            arr = _np.asarray(values)
            _binary.write_u32(ofi, arr.ndim, *arr.shape)
            _binary.write_f32(ofi, arr)


def read_weights(path: _PathLike) -> _Dict[str, _np.ndarray]:
    """Read a weight file.

    Args:
        path (PathLike): The file.

    Raises:
        FormatError: If the file is malformed or a name repeats.

    Returns:
        Dict[str, ndarray]: The float32 parameters in file order.
    """
    params: _Dict[str, _np.ndarray] = dict()
    with open(path, "rb") as ifi:
        _binary.expect_magic(ifi, WEIGHTS_MAGIC)
        while True:
            head = ifi.read(4)
            if len(head) == 0:
                break
            if len(head) != 4:
                raise _FormatError("Truncated parameter record.")
            (name_len,) = _np.frombuffer(head, dtype=_binary.U32)
            try:
                name = _binary.read_exact(ifi, int(name_len)).decode("utf-8")
            except UnicodeDecodeError as ude:
                raise _FormatError("Parameter name is not UTF-8.") from ude
            if name in params:
                raise _FormatError(f"Duplicate parameter {name!r}.")
            (rank,) = _binary.read_u32(ifi)
            dims = _binary.read_u32(ifi, rank)
            size = int(_np.prod(dims, dtype=_np.int64))
            params[name] = _binary.read_f32(ifi, size).reshape(dims)
    return params
