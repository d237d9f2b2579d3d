"""This module contains functions for hashing files and configurations."""

import hashlib as _hashlib
import json as _json

from typing import Any as _Any, IO as _IO

from . import tools as _tools
from .types import PathLike as _PathLike


def hash_fileobj(fileobj: _IO[bytes]) -> str:
    """Compute the SHA-256 checksum of a fileobj.

    Args:
        fileobj (IO[bytes]): The fileobj to hash.

    Returns:
        str: The hexadecimal digest.
    """
    sha = _hashlib.sha256()
    _tools.copy_fileobj_to_func(fileobj, sha.update)
    return sha.hexdigest()


def hash_file(path: _PathLike) -> str:
    """Compute the SHA-256 checksum of a file.

    Args:
        path (PathLike): The path to the file.

    Returns:
        str: The hexadecimal digest.
    """
    with open(path, "rb") as ifi:
        return hash_fileobj(ifi)


def hash_config(config: _Any) -> str:
    """Compute the SHA-256 checksum of a JSON-serializable configuration
    in canonical form (sorted keys, no whitespace).

    Args:
        config (Any): The configuration.

    Returns:
        str: The hexadecimal digest.
    """
    canonical = _json.dumps(config, sort_keys=True, separators=(",", ":"))
    return _hashlib.sha256(canonical.encode("utf-8")).hexdigest()
