"""This module contains the perceptual losses: the density weighted
scale loss and the attention based position loss.
"""

import numpy as _np

from scipy.special import expit as _expit
from typing import Optional as _Optional, Tuple as _Tuple, Union as _Union

from ._config import REGION_PATCH as _REGION_PATCH, \
    REGION_WHOLE as _REGION_WHOLE
from .. import autodiff as _ad
from ..density import DensityMap as _DensityMap
from ..models import DensityModel as _DensityModel, \
    UnknownLayerError as _UnknownLayerError


MapLike = _Union[_DensityMap, _ad.Tensor, _np.ndarray]
"""A density map as a `DensityMap`, a tensor or an array."""


def _values(m: MapLike) -> _np.ndarray:
    if isinstance(m, _DensityMap):
        return m.values
    if isinstance(m, _ad.Tensor):
        return m.data
    return _np.asarray(m)


def _as_image_tensor(
    x: _Union[_ad.Tensor, _np.ndarray], dtype: _np.dtype
) -> _ad.Tensor:
    if isinstance(x, _ad.Tensor):
        return x
    arr = _np.asarray(x)
    return _ad.Tensor(arr[None] if arr.ndim == 3 else arr, dtype=dtype)


def compose(
    x: _Union[_ad.Tensor, _np.ndarray],
    canvas: _ad.Tensor,
    mask: _np.ndarray
) -> _ad.Tensor:
    """Paste a patch canvas into an image, x_adv = (1 - M) * x + M *
    canvas, clipped to [0, 1].

    Args:
        x (Union[Tensor, ndarray]): The clean image of shape [C, H, W]
            or [1, C, H, W].
        canvas (Tensor): The image-sized patch canvas of shape
            [1, C, H, W], see `autodiff.place_patch`.
        mask (ndarray): The boolean footprint of shape [H, W].

    Raises:
        ShapeMismatchError: If the shapes do not align.

    Returns:
        Tensor: The adversarial image of shape [1, C, H, W].
    """
    xt = _as_image_tensor(x, canvas.dtype)
    if xt.shape != canvas.shape or mask.shape != xt.shape[-2:]:
        raise _ad.ShapeMismatchError(
            f"Image {xt.shape}, canvas {canvas.shape} and mask "
            f"{mask.shape} do not align."
        )
    m = _np.broadcast_to(_np.asarray(mask, dtype=canvas.dtype), xt.shape)
    kept = _ad.mul(xt, _np.ascontiguousarray(1.0 - m))
    pasted = _ad.mul(canvas, _np.ascontiguousarray(m))
    return _ad.clip(_ad.add(kept, pasted), 0.0, 1.0)


def density_weights(target: MapLike, pred: MapLike) -> _np.ndarray:
    """The adaptive density weights W = sigmoid(I - pred). No gradient
    flows through the result.

    Args:
        target (MapLike): The ground-truth map I.
        pred (MapLike): The current prediction at the same resolution.

    Raises:
        ShapeMismatchError: If the maps have different sizes.

    Returns:
        ndarray: W in the shape of `pred`.
    """
    i = _values(target)
    p = _values(pred)
    if i.shape[-2:] != p.shape[-2:] or i.size != p.size:
        raise _ad.ShapeMismatchError(
            f"Ground truth of shape {i.shape} does not match prediction "
            f"of shape {p.shape}."
        )
    diff = i.reshape(p.shape).astype(_np.float64) - p
    return _expit(diff).astype(p.dtype, copy=False)


def scale_loss(weights: _np.ndarray, pred: _ad.Tensor) -> _ad.Tensor:
    """The scale perception loss sum(W * pred).

    Raises:
        ShapeMismatchError: If the shapes differ.
    """
    w = _np.asarray(weights)
    if w.size != pred.size or w.shape[-2:] != pred.shape[-2:]:
        raise _ad.ShapeMismatchError(
            f"Weights of shape {w.shape} do not match prediction of "
            f"shape {pred.shape}."
        )
    return _ad.reduce_sum(
        _ad.mul(pred, w.reshape(pred.shape).astype(pred.dtype))
    )


def channel_weights(
    model: _DensityModel, layer: str, activation: _ad.Tensor
) -> _np.ndarray:
    """The spatially averaged gradient of the predicted count with
    respect to every channel of an activation. Computed on a separate
    tape from a detached copy of the activation.

    Raises:
        UnknownLayerError: If the model cannot resume from `layer`.

    Returns:
        ndarray: One weight per channel.
    """
    leaf = _ad.Tensor(activation.data, requires_grad=True)
    with _ad.Tape() as tape:
        count = _ad.reduce_sum(model.forward_from(layer, leaf))
    if count.requires_grad:
        tape.backward(count)
    if leaf.grad is None:
        return _np.zeros(activation.shape[1], dtype=activation.dtype)
    return leaf.grad.mean(axis=(0, 2, 3))


def attention_from_activation(
    model: _DensityModel, layer: str, activation: _ad.Tensor
) -> _ad.Tensor:
    """Density attention relu(sum_k w_k * A^k) of a given activation.
    The channel weights are constants; the result is differentiable
    with respect to the activation.

    Raises:
        ShapeMismatchError: If the activation is not 4-D.
        UnknownLayerError: If the model cannot resume from `layer`.

    Returns:
        Tensor: The non-negative map of shape [1, 1, h, w].
    """
    if activation.ndim != 4:
        raise _ad.ShapeMismatchError(
            f"Expected a 4-D activation, got {activation.shape}."
        )
    w = channel_weights(model, layer, activation)
    kernel = _ad.Tensor(w.reshape(1, -1, 1, 1), dtype=activation.dtype)
    bias = _ad.Tensor(_np.zeros(1), dtype=activation.dtype)
    return _ad.relu(_ad.conv2d(activation, kernel, bias))


def attention_map(
    model: _DensityModel,
    x_adv: _Union[_ad.Tensor, _np.ndarray],
    layer: _Optional[str] = None
) -> _ad.Tensor:
    """Density attention of an image at a model layer.

    Args:
        model (DensityModel): The source model.
        x_adv (Union[Tensor, ndarray]): The image.
        layer (Optional[str]): The layer. None selects the model's
            default attention layer.

    Raises:
        UnknownLayerError: If the layer does not exist or cannot be
            resumed from.

    Returns:
        Tensor: The non-negative map at layer resolution.
    """
    layer = layer or model.spec.default_attention_layer
    acts = model.activations(x_adv)
    if layer not in acts:
        raise _UnknownLayerError(layer)
    return attention_from_activation(model, layer, acts[layer])


def upsample_attention(
    attention: _ad.Tensor, image_hw: _Tuple[int, int]
) -> _ad.Tensor:
    """Bilinearly resize an attention map to image resolution."""
    h, w = image_hw
    if attention.shape[-2:] == (h, w):
        return attention
    return _ad.upsample_bilinear(attention, h, w)


def position_loss(
    attention: _ad.Tensor, mask: _np.ndarray, region: str = _REGION_PATCH
) -> _ad.Tensor:
    """The position perception loss, the attention summed over the patch
    footprint after upsampling to the mask's resolution.

    Args:
        attention (Tensor): The map S of shape [1, 1, h, w].
        mask (ndarray): The boolean image-sized footprint.
        region (str, optional): "patch" sums over the footprint,
            "whole" over the entire map. Defaults to "patch".

    Raises:
        ShapeMismatchError: If the mask is not 2-D.
        ValueError: If the region is unknown.

    Returns:
        Tensor: The scalar loss.
    """
    if region not in (_REGION_PATCH, _REGION_WHOLE):
        raise ValueError(f"Unknown attention region {region!r}.")
    m = _np.asarray(mask, dtype=bool)
    if m.ndim != 2:
        raise _ad.ShapeMismatchError(
            f"The mask must be 2-D, got shape {m.shape}."
        )
    up = upsample_attention(attention, m.shape)
    return _ad.reduce_sum(up, m if region == _REGION_PATCH else None)
