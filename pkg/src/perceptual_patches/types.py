"""This module contains typing utilities."""

import os as _os

from typing import Union as _Union


PathLike = _Union[str, "_os.PathLike[str]"]
"""The type of file system paths accepted by the I/O functions."""
