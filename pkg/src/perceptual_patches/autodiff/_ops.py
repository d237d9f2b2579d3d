"""This module contains the differentiable operations. Each operation
computes its result with numpy and, if a tape is active and an operand
requires a gradient, records its local vector-Jacobian product.
"""

import numpy as _np

from numpy.lib.stride_tricks import sliding_window_view as \
    _sliding_window_view
from scipy.special import expit as _expit
from typing import Any as _Any, Callable as _Callable, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple, \
    Union as _Union

from . import _exceptions
from ._tape import active_tape as _active_tape
from ._tensor import Tensor as _Tensor


Operand = _Union[_Tensor, _np.ndarray, float, int]
"""Values accepted as operands of the elementwise operations."""

_GradList = _Sequence[_Optional[_np.ndarray]]


def _make_output(
    arr: _np.ndarray,
    inputs: _Sequence[_Tensor],
    backward: _Callable[[_np.ndarray], _GradList]
) -> _Tensor:
    """Wrap the result of an operation and record it on the active tape
    if any operand requires a gradient.

    Args:
        arr (ndarray): The computed values.
        inputs (Sequence[Tensor]): The tensor operands.
        backward (Callable[[ndarray], Sequence[Optional[ndarray]]]): The
            local vector-Jacobian product.

    Raises:
        NonFiniteError: If `arr` contains NaN or infinite values.

    Returns:
        Tensor: The result.
    """
    tape = _active_tape()
    record = tape is not None and any(t.requires_grad for t in inputs)
    out = _Tensor._wrap(arr, requires_grad=record)
    if record:
        out._tape = tape
        tape.record(out, inputs, backward)  # type: ignore [union-attr]
    return out


def _require_ndim(x: _Tensor, ndim: int, name: str) -> None:
    if x.ndim != ndim:
        raise _exceptions.ShapeMismatchError(
            f"{name} must have {ndim} dimensions, got shape {x.shape}."
        )


def conv2d(
    input: _Tensor,
    kernel: _Tensor,
    bias: _Tensor,
    dilation: int = 1,
    padding: str = "same"
) -> _Tensor:
    """Stride-1 zero-padded cross-correlation.

    Args:
        input (Tensor): The input of shape [N, C, H, W].
        kernel (Tensor): The kernel of shape [K, C, kh, kw] with odd
            spatial sizes.
        bias (Tensor): The bias of shape [K].
        dilation (int, optional): The kernel dilation. Defaults to 1.
        padding (str, optional): Only "same" is supported.

    Raises:
        ShapeMismatchError: If the shapes are inconsistent or a kernel
            size is even.
        ValueError: If `dilation` is smaller than 1 or `padding` is not
            "same".

    Returns:
        Tensor: The output of shape [N, K, H, W].
    """
    if padding != "same":
        raise ValueError(f"Unsupported padding {padding!r}.")
    if dilation < 1:
        raise ValueError(f"The dilation must be >= 1, got {dilation}.")
    _require_ndim(input, 4, "input")
    _require_ndim(kernel, 4, "kernel")
    n, c, h, w = input.shape
    k, kc, kh, kw = kernel.shape
    if kc != c:
        raise _exceptions.ShapeMismatchError(
            f"The kernel expects {kc} channels, the input has {c}."
        )
    if bias.shape != (k,):
        raise _exceptions.ShapeMismatchError(
            f"The bias must have shape ({k},), got {bias.shape}."
        )
    if kh % 2 == 0 or kw % 2 == 0:
        raise _exceptions.ShapeMismatchError(
            f"Kernel sizes must be odd, got {kh}x{kw}."
        )

    ph = dilation * (kh - 1) // 2
    pw = dilation * (kw - 1) // 2
    xp = _np.pad(input.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    extent = (dilation * (kh - 1) + 1, dilation * (kw - 1) + 1)
    windows = _sliding_window_view(xp, extent, axis=(2, 3))
    windows = windows[..., ::dilation, ::dilation]
    # [N, C, H, W, kh, kw] x [K, C, kh, kw] -> [N, H, W, K]
    out = _np.tensordot(windows, kernel.data, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias.data[None, :, None, None]
    out = _np.ascontiguousarray(out)

    def backward(g: _np.ndarray) -> _GradList:
        gx = gk = gb = None
        if input.requires_grad:
            gxp = _np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    contrib = _np.tensordot(
                        g, kernel.data[:, :, i, j], axes=([1], [0])
                    )
                    r = i * dilation
                    s = j * dilation
                    gxp[:, :, r:r + h, s:s + w] += \
                        contrib.transpose(0, 3, 1, 2)
            gx = gxp[:, :, ph:ph + h, pw:pw + w]
        if kernel.requires_grad:
            gk = _np.tensordot(g, windows, axes=([0, 2, 3], [0, 2, 3]))
        if bias.requires_grad:
            gb = g.sum(axis=(0, 2, 3))
        return (gx, gk, gb)

    return _make_output(out, (input, kernel, bias), backward)


def _coerce(value: Operand, like: _Tensor) -> _Tensor:
    """Turn a non-tensor operand into a constant tensor of the precision
    of `like`.
    """
    if isinstance(value, _Tensor):
        return value
    return _Tensor(_np.asarray(value), dtype=like.dtype)


def _reduce_to(g: _np.ndarray, shape: _Tuple[int, ...]) -> _np.ndarray:
    """Sum a gradient down to a scalar operand's shape."""
    if g.shape == shape:
        return g
    return _np.asarray(g.sum()).reshape(shape)


def elementwise(op: str, a: Operand, b: Operand) -> _Tensor:
    """Apply a pointwise binary operation. Operands must have identical
    shapes unless one of them is a scalar.

    Args:
        op (str): One of "add", "sub" and "mul".
        a (Operand): The first operand.
        b (Operand): The second operand.

    Raises:
        ShapeMismatchError: If the shapes differ and neither operand is
            a scalar.
        ValueError: If `op` is unknown.

    Returns:
        Tensor: The result.
    """
    if not isinstance(a, _Tensor):
        if not isinstance(b, _Tensor):
            raise TypeError("At least one operand must be a Tensor.")
        a = _coerce(a, b)
    b = _coerce(b, a)
    if a.shape != b.shape and a.ndim != 0 and b.ndim != 0:
        raise _exceptions.ShapeMismatchError(
            f"Operand shapes {a.shape} and {b.shape} differ."
        )
    ta: _Tensor = a
    tb: _Tensor = b

    backward: _Callable[[_np.ndarray], _GradList]
    if op == "add":
        out = ta.data + tb.data

        def backward(g: _np.ndarray) -> _GradList:
            return (_reduce_to(g, ta.shape), _reduce_to(g, tb.shape))

    elif op == "sub":
        out = ta.data - tb.data

        def backward(g: _np.ndarray) -> _GradList:
            return (_reduce_to(g, ta.shape), _reduce_to(-g, tb.shape))

    elif op == "mul":
        out = ta.data * tb.data

        def backward(g: _np.ndarray) -> _GradList:
            return (
                _reduce_to(g * tb.data, ta.shape),
                _reduce_to(g * ta.data, tb.shape)
            )

    else:
        raise ValueError(f"Unknown elementwise operation {op!r}.")

    return _make_output(_np.asarray(out), (ta, tb), backward)


def add(a: Operand, b: Operand) -> _Tensor:
    """Pointwise sum, see `elementwise`."""
    return elementwise("add", a, b)


def sub(a: Operand, b: Operand) -> _Tensor:
    """Pointwise difference, see `elementwise`."""
    return elementwise("sub", a, b)


def mul(a: Operand, b: Operand) -> _Tensor:
    """Pointwise product, see `elementwise`."""
    return elementwise("mul", a, b)


def activation(op: str, x: _Tensor) -> _Tensor:
    """Apply a pointwise non-linearity.

    Args:
        op (str): Either "relu" or "sigmoid".
        x (Tensor): The input.

    Raises:
        ValueError: If `op` is unknown.

    Returns:
        Tensor: The result.
    """
    if op == "relu":
        active = x.data > 0
        out = _np.where(active, x.data, _np.zeros_like(x.data))

        def backward(g: _np.ndarray) -> _GradList:
            # The subgradient at exactly 0 is 0.
            return (g * active,)

    elif op == "sigmoid":
        out = _expit(x.data)

        def backward(g: _np.ndarray) -> _GradList:
            return (g * out * (1 - out),)

    else:
        raise ValueError(f"Unknown activation {op!r}.")

    return _make_output(out, (x,), backward)


def relu(x: _Tensor) -> _Tensor:
    """Rectified linear unit, see `activation`."""
    return activation("relu", x)


def sigmoid(x: _Tensor) -> _Tensor:
    """Logistic function, see `activation`."""
    return activation("sigmoid", x)


def maxpool2(x: _Tensor) -> _Tensor:
    """Non-overlapping 2x2 max pooling. The gradient is routed to the
    first maximal element of each window in row-major order.

    Args:
        x (Tensor): The input of shape [N, C, H, W] with even H and W.

    Raises:
        ShapeMismatchError: If `x` is not 4-D or H or W is odd.

    Returns:
        Tensor: The output of shape [N, C, H/2, W/2].
    """
    _require_ndim(x, 4, "input")
    n, c, h, w = x.shape
    if h % 2 != 0 or w % 2 != 0:
        raise _exceptions.ShapeMismatchError(
            f"maxpool2 requires even spatial dims, got {h}x{w}."
        )
    ho, wo = h // 2, w // 2
    windows = x.data.reshape(n, c, ho, 2, wo, 2).transpose(0, 1, 2, 4, 3, 5)
    windows = windows.reshape(n, c, ho, wo, 4)
    idx = _np.argmax(windows, axis=-1)[..., None]
    out = _np.take_along_axis(windows, idx, axis=-1)[..., 0]

    def backward(g: _np.ndarray) -> _GradList:
        gw = _np.zeros((n, c, ho, wo, 4), dtype=g.dtype)
        _np.put_along_axis(gw, idx, g[..., None], axis=-1)
        gw = gw.reshape(n, c, ho, wo, 2, 2).transpose(0, 1, 2, 4, 3, 5)
        return (gw.reshape(n, c, h, w),)

    return _make_output(_np.ascontiguousarray(out), (x,), backward)


def _interpolation_matrix(
    n_in: int, n_out: int, dtype: _Any
) -> _np.ndarray:
    """Build the [n_out, n_in] matrix of 1-D linear interpolation with
    half-pixel centers (align_corners=False).
    """
    src = (_np.arange(n_out, dtype=_np.float64) + 0.5) * (n_in / n_out) - 0.5
    src = _np.maximum(src, 0.0)
    i0 = _np.minimum(_np.floor(src).astype(_np.int64), n_in - 1)
    i1 = _np.minimum(i0 + 1, n_in - 1)
    frac = src - i0
    rows = _np.arange(n_out)
    mat = _np.zeros((n_out, n_in), dtype=_np.float64)
    _np.add.at(mat, (rows, i0), 1.0 - frac)
    _np.add.at(mat, (rows, i1), frac)
    return mat.astype(dtype)


def upsample_bilinear(x: _Tensor, out_h: int, out_w: int) -> _Tensor:
    """Resize the two trailing dimensions by bilinear interpolation with
    half-pixel centers.

    Args:
        x (Tensor): The input with at least 2 dimensions.
        out_h (int): The output height.
        out_w (int): The output width.

    Raises:
        ShapeMismatchError: If `x` has fewer than 2 dimensions.
        ValueError: If an output dimension is smaller than 1.

    Returns:
        Tensor: The resized tensor.
    """
    if out_h < 1 or out_w < 1:
        raise ValueError(
            f"Output dimensions must be >= 1, got {out_h}x{out_w}."
        )
    if x.ndim < 2:
        raise _exceptions.ShapeMismatchError(
            f"upsample_bilinear requires >= 2 dimensions, got {x.shape}."
        )
    rh = _interpolation_matrix(x.shape[-2], out_h, x.dtype)
    rw = _interpolation_matrix(x.shape[-1], out_w, x.dtype)
    out = _np.matmul(_np.matmul(rh, x.data), rw.T)

    def backward(g: _np.ndarray) -> _GradList:
        return (_np.matmul(_np.matmul(rh.T, g), rw),)

    return _make_output(out, (x,), backward)


def _full_mask(x: _Tensor, region: _Optional[_np.ndarray]) -> _np.ndarray:
    """Broadcast a region mask to the shape of `x`."""
    if region is None:
        return _np.ones(x.shape, dtype=bool)
    mask = _np.asarray(region, dtype=bool)
    if mask.shape != x.shape and mask.shape != x.shape[-2:]:
        raise _exceptions.ShapeMismatchError(
            f"Mask of shape {mask.shape} does not match tensor of shape "
            f"{x.shape}."
        )
    return _np.broadcast_to(mask, x.shape)


def reduce_sum(x: _Tensor, region: _Optional[_np.ndarray] = None) -> _Tensor:
    """Sum all entries, or the entries selected by a boolean mask.

    Args:
        x (Tensor): The input.
        region (Optional[ndarray]): A boolean mask of the shape of `x`
            or of its two trailing dimensions. Defaults to None, which
            sums all entries.

    Raises:
        ShapeMismatchError: If the mask shape does not match.

    Returns:
        Tensor: The scalar sum.
    """
    mask = _full_mask(x, region)
    out = _np.asarray(_np.sum(x.data, where=mask), dtype=x.dtype)

    def backward(g: _np.ndarray) -> _GradList:
        return (g * mask.astype(x.dtype),)

    return _make_output(out, (x,), backward)


def concat_channels(tensors: _Sequence[_Tensor]) -> _Tensor:
    """Concatenate 4-D tensors along the channel axis.

    Args:
        tensors (Sequence[Tensor]): The tensors of shape [N, C_i, H, W].

    Raises:
        ShapeMismatchError: If the tensors disagree outside the channel
            axis.
        ValueError: If `tensors` is empty.

    Returns:
        Tensor: The result of shape [N, sum(C_i), H, W].
    """
    if len(tensors) == 0:
        raise ValueError("Nothing to concatenate.")
    for t in tensors:
        _require_ndim(t, 4, "input")
    first = tensors[0].shape
    for t in tensors[1:]:
        if t.shape[0] != first[0] or t.shape[2:] != first[2:]:
            raise _exceptions.ShapeMismatchError(
                f"Cannot concatenate shapes {first} and {t.shape}."
            )
    out = _np.concatenate([t.data for t in tensors], axis=1)
    bounds = _np.cumsum([0] + [t.shape[1] for t in tensors])

    def backward(g: _np.ndarray) -> _GradList:
        return tuple(
            g[:, bounds[i]:bounds[i + 1]] for i in range(len(tensors))
        )

    return _make_output(out, tuple(tensors), backward)


def clip(x: _Tensor, lo: float = 0.0, hi: float = 1.0) -> _Tensor:
    """Clip to a closed interval. The gradient passes where the input
    lies within the interval.

    Args:
        x (Tensor): The input.
        lo (float, optional): The lower bound. Defaults to 0.
        hi (float, optional): The upper bound. Defaults to 1.

    Returns:
        Tensor: The clipped tensor.
    """
    inside = (x.data >= lo) & (x.data <= hi)
    out = _np.clip(x.data, lo, hi).astype(x.dtype, copy=False)

    def backward(g: _np.ndarray) -> _GradList:
        return (g * inside,)

    return _make_output(out, (x,), backward)


def place_patch(
    delta: _Tensor,
    top: int,
    left: int,
    height: int,
    width: int,
    rotation: int = 0
) -> _Tensor:
    """Place a square texture into an otherwise zero image canvas.

    Args:
        delta (Tensor): The texture of shape [C, P, P].
        top (int): The row of the upper left corner.
        left (int): The column of the upper left corner.
        height (int): The canvas height.
        width (int): The canvas width.
        rotation (int, optional): The number of counter-clockwise
            quarter turns applied to the texture. Defaults to 0.

    Raises:
        ShapeMismatchError: If `delta` is not a square 3-D texture or
            does not fit into the canvas at the position.

    Returns:
        Tensor: The canvas of shape [1, C, height, width].
    """
    _require_ndim(delta, 3, "delta")
    c, p, q = delta.shape
    if p != q:
        raise _exceptions.ShapeMismatchError(
            f"The texture must be square, got {p}x{q}."
        )
    if top < 0 or left < 0 or top + p > height or left + p > width:
        raise _exceptions.ShapeMismatchError(
            f"A {p}px texture at ({top}, {left}) exceeds the "
            f"{height}x{width} canvas."
        )
    k = rotation % 4
    canvas = _np.zeros((1, c, height, width), dtype=delta.dtype)
    canvas[0, :, top:top + p, left:left + p] = _np.rot90(
        delta.data, k, axes=(1, 2)
    )

    def backward(g: _np.ndarray) -> _GradList:
        window = g[0, :, top:top + p, left:left + p]
        return (_np.ascontiguousarray(_np.rot90(window, -k, axes=(1, 2))),)

    return _make_output(canvas, (delta,), backward)


def sum_scalars(values: _List[_Tensor]) -> _Tensor:
    """Sum a list of scalar tensors.

    Args:
        values (List[Tensor]): The scalars.

    Raises:
        ValueError: If `values` is empty.

    Returns:
        Tensor: The scalar sum.
    """
    if len(values) == 0:
        raise ValueError("Nothing to sum.")
    total = values[0]
    for v in values[1:]:
        total = add(total, v)
    return total
