"""Binary PPM (P6) images with 8-bit samples."""

import numpy as _np

from typing import IO as _IO, List as _List

from . import _binary
from ._exceptions import FormatError as _FormatError
from ..types import PathLike as _PathLike


def to_uint8(image: _np.ndarray) -> _np.ndarray:
    """Quantize a [C, H, W] image with values in [0, 1] to an
    [H, W, 3] byte array. Single-channel images are replicated.

    Args:
        image (ndarray): The image with 1 or 3 channels.

    Raises:
        ValueError: If the channel count is not 1 or 3.

    Returns:
        ndarray: The interleaved bytes.
    """
    arr = _np.asarray(image, dtype=_np.float64)
    if arr.ndim != 3 or arr.shape[0] not in (1, 3):
        raise ValueError(f"Expected a [1|3, H, W] image, got {arr.shape}.")
    if arr.shape[0] == 1:
        arr = _np.repeat(arr, 3, axis=0)
    q = _np.rint(_np.clip(arr, 0.0, 1.0) * 255.0).astype(_np.uint8)
    return _np.ascontiguousarray(q.transpose(1, 2, 0))


def write_ppm(path: _PathLike, image: _np.ndarray) -> None:
    """Write a [C, H, W] image with values in [0, 1] as binary PPM.

    Args:
        path (PathLike): The target file.
        image (ndarray): The image with 1 or 3 channels.
    """
    q = to_uint8(image)
    h, w, _ = q.shape
    with open(path, "wb") as ofi:
        ofi.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        ofi.write(q.tobytes())


def _header_tokens(ifi: _IO[bytes], count: int) -> _List[bytes]:
    """Read whitespace separated header tokens, skipping comments. The
    single whitespace byte after the last token is consumed.
    """
    tokens: _List[bytes] = list()
    current = b""
    while len(tokens) < count:
        ch = _binary.read_exact(ifi, 1)
        if ch == b"#":
            while ch not in (b"\n", b"\r"):
                ch = _binary.read_exact(ifi, 1)
        if ch.isspace():
            if current:
                tokens.append(current)
                current = b""
            continue
        current += ch
    return tokens


def read_ppm(path: _PathLike) -> _np.ndarray:
    """Read a binary PPM file with a maximum value of 255.

    Args:
        path (PathLike): The file.

    Raises:
        FormatError: If the file is not an 8-bit P6 image.

    Returns:
        ndarray: The float32 image of shape [3, H, W] in [0, 1].
    """
    with open(path, "rb") as ifi:
        magic, w_tok, h_tok, max_tok = _header_tokens(ifi, 4)
        if magic != b"P6":
            raise _FormatError(f"Expected magic b'P6', found {magic!r}.")
        try:
            w, h, maxval = int(w_tok), int(h_tok), int(max_tok)
        except ValueError as ve:
            raise _FormatError("Malformed PPM header.") from ve
        if maxval != 255:
            raise _FormatError(f"Unsupported maximum value {maxval}.")
        raw = _binary.read_exact(ifi, w * h * 3)
    q = _np.frombuffer(raw, dtype=_np.uint8).reshape(h, w, 3)
    return (q.transpose(2, 0, 1).astype(_np.float32) / 255.0)
