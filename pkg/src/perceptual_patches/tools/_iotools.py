import json as _json
import os as _os
import shutil as _shutil

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Callable as _Callable, IO as _IO

from ..types import PathLike as _PathLike


WriteFunction = _Callable[[bytes], _Any]
"""Function signature of an io "write" function."""


@_dataclass(frozen=True)
class _MockTargetFileobj:
    """An object mocking a fileobj with a "write" function."""

    __slots__ = ("write",)

    write: WriteFunction
    """The write function."""


def copy_fileobj_to_func(
    fileobj: _IO[bytes],
    func: WriteFunction,
    length: int = 0
):
    """Stream a fileobj into a function accepting bytes, the way
    `shutil.copyfileobj` streams into a file.

    Args:
        fileobj (IO[bytes]): The fileobj to read.
        func (WriteFunction): The function receiving the chunks.
        length (int, optional): The chunk size. Defaults to 0, which
            uses the `shutil` default.
    """
    target = _MockTargetFileobj(func)
    _shutil.copyfileobj(fileobj, target, length)


def write_json(path: _PathLike, obj: _Any) -> None:
    """Write an object as JSON with sorted keys, so that equal objects
    produce byte-identical files.

    Args:
        path (PathLike): The target file, overwritten if present.
        obj (Any): The JSON-serializable object.
    """
    parent = _os.path.dirname(_os.fspath(path))
    if parent:
        _os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as ofi:
        _json.dump(obj, ofi, indent=2, sort_keys=True)
        ofi.write("\n")


def read_json(path: _PathLike) -> _Any:
    """Read a JSON file.

    Args:
        path (PathLike): The file.

    Raises:
        FileNotFoundError: If the file does not exist.
        JSONDecodeError: If the file is not valid JSON.

    Returns:
        Any: The decoded object.
    """
    with open(path, "r", encoding="utf-8") as ifi:
        return _json.load(ifi)
