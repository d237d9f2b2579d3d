"""This module contains tool functions."""

__all__ = [
    "copy_fileobj_to_func",
    "write_json",
    "read_json",
    "derive_rng"
]


from ._iotools import copy_fileobj_to_func, write_json, read_json
from ._random import derive_rng
