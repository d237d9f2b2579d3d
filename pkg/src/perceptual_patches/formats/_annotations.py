"""Annotation files hold one scene per line as a JSON object
{"image": path, "points": [[x, y], ...]}.
"""

import json as _json
import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Iterable as _Iterable, List as _List

from ._exceptions import FormatError as _FormatError
from ..types import PathLike as _PathLike


@_dataclass(frozen=True)
class AnnotationRecord:
    """A single line of an annotation file."""

    __slots__ = ("image", "points")

    image: str
    """The image path, relative to the annotation file."""

    points: _np.ndarray
    """The head centers as an [N, 2] array of (x, y)."""


def write_annotations(
    path: _PathLike, records: _Iterable[AnnotationRecord]
) -> None:
    """Write annotation records, one JSON object per line.

    Args:
        path (PathLike): The target file.
        records (Iterable[AnnotationRecord]): The records.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as ofi:
        for rec in records:
            points = [[float(x), float(y)] for x, y in rec.points]
            line = _json.dumps({"image": rec.image, "points": points})
            ofi.write(line)
            ofi.write("\n")


def read_annotations(path: _PathLike) -> _List[AnnotationRecord]:
    """Read an annotation file. Blank lines are ignored.

    Args:
        path (PathLike): The file.

    Raises:
        FormatError: If a line is not a valid record.

    Returns:
        List[AnnotationRecord]: The records in file order.
    """
    records: _List[AnnotationRecord] = list()
    with open(path, "r", encoding="utf-8") as ifi:
        for lineno, line in enumerate(ifi, start=1):
            if not line.strip():
                continue
            try:
                obj = _json.loads(line)
                image = obj["image"]
                points = _np.asarray(obj["points"], dtype=_np.float64)
            except (ValueError, KeyError, TypeError) as ex:
                raise _FormatError(
                    f"Malformed annotation on line {lineno}."
                ) from ex
            if points.size == 0:
                points = points.reshape(0, 2)
            if points.ndim != 2 or points.shape[1] != 2:
                raise _FormatError(
                    f"Points on line {lineno} are not (x, y) pairs."
                )
            records.append(AnnotationRecord(str(image), points))
    return records
