"""This module writes and reads the evaluation report files."""

import csv as _csv
import numpy as _np
import os as _os

from typing import Any as _Any, Dict as _Dict, IO as _IO, List as _List, \
    Mapping as _Mapping, Sequence as _Sequence, Tuple as _Tuple

from ._metrics import Metrics as _Metrics, SceneCounts as _SceneCounts
from ._transfer import TransferMatrix as _TransferMatrix, \
    TransferRow as _TransferRow
from .. import formats as _formats
from ..types import PathLike as _PathLike


TRANSFER_HEADER = ("source", "target", "mae", "mse", "n")

PER_SCENE_HEADER = (
    "source", "target", "scene", "count_gt", "count_clean", "count_adv"
)

CURVE_HEADER = ("gamma", "fraction")


def _open_for_write(path: _PathLike) -> _IO[str]:
    parent = _os.path.dirname(_os.fspath(path))
    if parent:
        _os.makedirs(parent, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def write_transfer_csv(path: _PathLike, matrix: _TransferMatrix) -> None:
    """Write the clean row and all source rows."""
    with _open_for_write(path) as ofi:
        w = _csv.writer(ofi, lineterminator="\n")
        w.writerow(TRANSFER_HEADER)
        for r in matrix.rows():
            w.writerow((r.source, r.target, repr(r.mae), repr(r.mse), r.n))


def read_transfer_csv(path: _PathLike) -> _List[_TransferRow]:
    """Read a file written by `write_transfer_csv`.

    Raises:
        FormatError: If the header or a row is malformed.
    """
    with open(path, "r", newline="", encoding="utf-8") as ifi:
        reader = _csv.reader(ifi)
        header = tuple(next(reader, ()))
        if header != TRANSFER_HEADER:
            raise _formats.FormatError(f"Unexpected header {header}.")
        rows = list()
        for line in reader:
            try:
                source, target, mae, mse, n = line
                rows.append(
                    _TransferRow(source, target, float(mae), float(mse),
                                 int(n))
                )
            except ValueError as ve:
                raise _formats.FormatError(
                    f"Malformed transfer row {line}."
                ) from ve
        return rows


def write_per_scene_csv(path: _PathLike, matrix: _TransferMatrix) -> None:
    """Write the counts of every scene under every (source, target)
    pair.
    """
    with _open_for_write(path) as ofi:
        w = _csv.writer(ofi, lineterminator="\n")
        w.writerow(PER_SCENE_HEADER)
        for (source, target), m in matrix.cells.items():
            for s in m.per_scene:
                w.writerow((
                    source, target, s.scene, repr(s.count_gt),
                    repr(s.count_clean), repr(s.count_adv)
                ))


def _metrics_to_json(m: _Metrics) -> _Dict[str, _Any]:
    return {
        "mae": m.mae,
        "mse": m.mse,
        "n": m.n,
        "per_scene": [
            [s.scene, s.count_gt, s.count_clean, s.count_adv]
            for s in m.per_scene
        ],
    }


def _metrics_from_json(obj: _Mapping[str, _Any]) -> _Metrics:
    per_scene = tuple(
        _SceneCounts(int(i), float(g), float(c), float(a))
        for i, g, c, a in obj["per_scene"]
    )
    return _Metrics(
        float(obj["mae"]), float(obj["mse"]), int(obj["n"]), per_scene
    )


def matrix_to_json(matrix: _TransferMatrix) -> _Dict[str, _Any]:
    """Convert a matrix to a JSON-serializable dict."""
    return {
        "sources": list(matrix.sources),
        "targets": list(matrix.targets),
        "clean": {
            t: _metrics_to_json(m) for t, m in matrix.clean.items()
        },
        "cells": [
            {"source": s, "target": t, "metrics": _metrics_to_json(m)}
            for (s, t), m in matrix.cells.items()
        ],
    }


def matrix_from_json(obj: _Mapping[str, _Any]) -> _TransferMatrix:
    """Create a matrix from a dict produced by `matrix_to_json`.

    Raises:
        FormatError: If a key is missing.
    """
    try:
        return _TransferMatrix(
            tuple(obj["sources"]),
            tuple(obj["targets"]),
            {t: _metrics_from_json(m) for t, m in obj["clean"].items()},
            {
                (c["source"], c["target"]): _metrics_from_json(c["metrics"])
                for c in obj["cells"]
            },
        )
    except (KeyError, TypeError, ValueError) as err:
        raise _formats.FormatError("Malformed transfer matrix.") from err


def write_curve_csv(
    path: _PathLike, curve: _Sequence[_Tuple[float, float]]
) -> None:
    """Write an overestimation curve."""
    with _open_for_write(path) as ofi:
        w = _csv.writer(ofi, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for gamma, fraction in curve:
            w.writerow((repr(float(gamma)), repr(float(fraction))))


def write_table_csv(
    path: _PathLike, rows: _Sequence[_Mapping[str, _Any]]
) -> None:
    """Write dict rows with the keys of the first row as header.

    Raises:
        ValueError: If `rows` is empty.
    """
    if len(rows) == 0:
        raise ValueError("No rows to write.")
    with _open_for_write(path) as ofi:
        w = _csv.DictWriter(
            ofi, fieldnames=list(rows[0]), lineterminator="\n"
        )
        w.writeheader()
        w.writerows(rows)


def _density_to_image(
    density: _np.ndarray, image_hw: _Tuple[int, int], peak: float
) -> _np.ndarray:
    """Upsample a map by repetition to image size and scale it to
    [0, 1] by `peak`.
    """
    h, w = image_hw
    d = _np.asarray(density, dtype=_np.float64)
    d = _np.repeat(_np.repeat(d, h // d.shape[0], 0), w // d.shape[1], 1)
    if peak > 0:
        d = d / peak
    return _np.broadcast_to(_np.clip(d, 0.0, 1.0), (3, h, w))


def side_by_side(
    clean: _np.ndarray,
    adv: _np.ndarray,
    density_clean: _np.ndarray,
    density_adv: _np.ndarray
) -> _np.ndarray:
    """Tile the clean image, the patched image and both predicted maps,
    normalized by their common maximum, into one [3, H, 4W] image.

    Raises:
        ValueError: If the image shapes differ.
    """
    if clean.shape != adv.shape:
        raise ValueError("The clean and patched images differ in shape.")
    c, h, w = clean.shape
    peak = float(max(_np.max(density_clean), _np.max(density_adv)))

    def rgb(img: _np.ndarray) -> _np.ndarray:
        return _np.broadcast_to(img, (3, h, w)) if c == 1 else img

    tiles = [
        rgb(clean), rgb(adv),
        _density_to_image(density_clean, (h, w), peak),
        _density_to_image(density_adv, (h, w), peak),
    ]
    return _np.concatenate(tiles, axis=2)


def write_visualization(path: _PathLike, image: _np.ndarray) -> None:
    """Write a [3, H, W] image in [0, 1] as binary PPM."""
    parent = _os.path.dirname(_os.fspath(path))
    if parent:
        _os.makedirs(parent, exist_ok=True)
    _formats.write_ppm(path, image)
