"""This module contains the `Tensor` type, the value container of the
differentiable engine.
"""

import numpy as _np

from typing import Any as _Any, Optional as _Optional, Tuple as _Tuple, \
    TYPE_CHECKING as _TYPE_CHECKING

from . import _exceptions

if _TYPE_CHECKING:  # pragma: no cover
    from ._tape import Tape as _Tape


DEFAULT_DTYPE = _np.float32
"""The precision used for tensors built from non-float data."""


def _check_finite(arr: _np.ndarray) -> None:
    """Raise if an array contains NaN or infinite values.

    Args:
        arr (ndarray): The array to check.

    Raises:
        NonFiniteError: If a non-finite value is present.
    """
    if not _np.isfinite(arr).all():
        raise _exceptions.NonFiniteError(
            "Encountered a non-finite value in tensor data."
        )


class Tensor:
    """An N-dimensional real-valued array which may take part in
    gradient recording.
    """

    __slots__ = ("data", "requires_grad", "grad", "_tape", "_is_leaf")

    __array_priority__ = 1000  # ndarray <op> Tensor defers to Tensor.

    def __init__(
        self,
        data: _Any,
        requires_grad: bool = False,
        *,
        dtype: _Optional[_Any] = None
    ) -> None:
        """Initialize a new leaf `Tensor`. The data is copied.

        Args:
            data (ArrayLike): The values.
            requires_grad (bool, optional): Whether gradients should be
                accumulated into `grad` when `backward` is called on a
                loss depending on this tensor. Defaults to False.
            dtype (DTypeLike, optional): The precision. If not given,
                floating point arrays keep their precision and all other
                data is converted to `DEFAULT_DTYPE`.

        Raises:
            NonFiniteError: If `data` contains NaN or infinite values.
        """
        if dtype is None:
            dtype = getattr(data, "dtype", None)
            if dtype is None or not _np.issubdtype(dtype, _np.floating):
                dtype = DEFAULT_DTYPE
        arr = _np.array(data, dtype=dtype, copy=True)
        _check_finite(arr)
        self.data: _np.ndarray = arr
        """The values."""
        self.requires_grad = bool(requires_grad)
        """Whether this tensor takes part in gradient recording."""
        self.grad: _Optional[_np.ndarray] = None
        """The accumulated gradient, once `backward` has populated it."""
        self._tape: "_Optional[_Tape]" = None
        """The tape that recorded the operation producing this tensor."""
        self._is_leaf = True
        """Whether the tensor was created directly rather than by an
        operation.
        """

    @classmethod
    def _wrap(
        cls, arr: _np.ndarray, requires_grad: bool = False
    ) -> "Tensor":
        """Wrap a freshly computed array without copying it.

        Args:
            arr (ndarray): The array, which must not be shared.
            requires_grad (bool, optional): Whether the result is
                recorded. Defaults to False.

        Raises:
            NonFiniteError: If `arr` contains NaN or infinite values.

        Returns:
            Tensor: The new non-leaf tensor.
        """
        _check_finite(arr)
        out = cls.__new__(cls)
        out.data = arr
        out.requires_grad = requires_grad
        out.grad = None
        out._tape = None
        out._is_leaf = False
        return out

    @property
    def shape(self) -> _Tuple[int, ...]:
        """The dimension sizes."""
        return self.data.shape

    @property
    def ndim(self) -> int:
        """The number of dimensions."""
        return self.data.ndim

    @property
    def size(self) -> int:
        """The number of values."""
        return self.data.size

    @property
    def dtype(self) -> _np.dtype:
        """The precision of the values."""
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        """Whether the tensor was created directly rather than by an
        operation.
        """
        return self._is_leaf

    def item(self) -> float:
        """Obtain the value of a single-element tensor.

        Raises:
            NonScalarError: If the tensor has more than one element.

        Returns:
            float: The value.
        """
        if self.data.size != 1:
            raise _exceptions.NonScalarError(
                f"Tensor of shape {self.shape} is not a scalar."
            )
        return float(self.data.reshape(()))

    def numpy(self) -> _np.ndarray:
        """Return a copy of the values.

        Returns:
            ndarray: The copy.
        """
        return self.data.copy()

    def detach(self) -> "Tensor":
        """Create a new leaf tensor holding a copy of the values which
        does not take part in gradient recording.

        Returns:
            Tensor: The constant tensor.
        """
        return Tensor(self.data)

    def zero_grad(self) -> None:
        """Drop the accumulated gradient."""
        self.grad = None

    def __add__(self, other: _Any) -> "Tensor":
        from ._ops import add
        return add(self, other)

    def __radd__(self, other: _Any) -> "Tensor":
        from ._ops import add
        return add(self, other)

    def __sub__(self, other: _Any) -> "Tensor":
        from ._ops import sub
        return sub(self, other)

    def __rsub__(self, other: _Any) -> "Tensor":
        from ._ops import mul, add
        return add(mul(self, -1.0), other)

    def __mul__(self, other: _Any) -> "Tensor":
        from ._ops import mul
        return mul(self, other)

    def __rmul__(self, other: _Any) -> "Tensor":
        from ._ops import mul
        return mul(self, other)

    def __neg__(self) -> "Tensor":
        from ._ops import mul
        return mul(self, -1.0)

    def __repr__(self) -> str:
        return (
            f"Tensor(shape={self.shape}, dtype={self.dtype}, "
            f"requires_grad={self.requires_grad})"
        )
