import numpy as _np

from typing import IO as _IO, Tuple as _Tuple

from ._exceptions import FormatError as _FormatError


U32 = _np.dtype("<u4")
"""Little-endian unsigned 32-bit integers."""

F32 = _np.dtype("<f4")
"""Little-endian 32-bit floats."""


def read_exact(ifi: _IO[bytes], n: int) -> bytes:
    """Read exactly `n` bytes.

    Raises:
        FormatError: If the file ends early.
    """
    data = ifi.read(n)
    if len(data) != n:
        raise _FormatError(
            f"Truncated file: expected {n} bytes, got {len(data)}."
        )
    return data


def expect_magic(ifi: _IO[bytes], magic: bytes) -> None:
    """Consume and check the magic string.

    Raises:
        FormatError: If the magic string does not match.
    """
    found = ifi.read(len(magic))
    if found != magic:
        raise _FormatError(f"Expected magic {magic!r}, found {found!r}.")


def read_u32(ifi: _IO[bytes], count: int = 1) -> _Tuple[int, ...]:
    """Read little-endian unsigned 32-bit integers."""
    raw = read_exact(ifi, 4 * count)
    return tuple(int(v) for v in _np.frombuffer(raw, dtype=U32))


def write_u32(ofi: _IO[bytes], *values: int) -> None:
    """Write little-endian unsigned 32-bit integers."""
    ofi.write(_np.asarray(values, dtype=U32).tobytes())


def read_f32(ifi: _IO[bytes], count: int) -> _np.ndarray:
    """Read little-endian 32-bit floats into a native float32 array."""
    raw = read_exact(ifi, 4 * count)
    return _np.frombuffer(raw, dtype=F32).astype(_np.float32)


def write_f32(ofi: _IO[bytes], values: _np.ndarray) -> None:
    """Write values as little-endian 32-bit floats in row-major order."""
    ofi.write(_np.ascontiguousarray(values, dtype=F32).tobytes())
