"""This module contains the joint optimization of a perceptual patch
over a set of scenes.
"""

import logging as _logging
import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Callable as _Callable, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple

from . import _exceptions
from ._config import AttackConfig as _AttackConfig, \
    STEP_SIGN as _STEP_SIGN, REGION_PATCH as _REGION_PATCH, \
    DECREASE as _DECREASE
from ._losses import compose as _compose, density_weights as _weights, \
    scale_loss as _scale_loss, upsample_attention as _upsample, \
    attention_from_activation as _attention
from ._mask import Placement as _Placement, \
    random_placement as _random_placement
from ._patch import Patch as _Patch
from .. import autodiff as _ad
from .. import tools as _tools
from ..density import DensityMap as _DensityMap, \
    downsample_preserving_sum as _downsample
from ..models import DensityModel as _DensityModel, \
    UnknownLayerError as _UnknownLayerError


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


AttackScene = _Tuple[_np.ndarray, _DensityMap]
"""An image of shape [C, H, W] with its ground-truth map."""


@_dataclass(frozen=True)
class StepRecord:
    """The losses of a single inner step, before the update."""

    __slots__ = (
        "epoch", "scene", "step", "scale_loss", "position_loss",
        "total_loss", "attention_mass"
    )

    epoch: int
    scene: int
    """The index of the scene in the input sequence."""

    step: int
    scale_loss: float
    position_loss: float
    """The position loss, 0 if lambda is 0."""

    total_loss: float
    attention_mass: float
    """The attention summed over the patch footprint."""


StepCallback = _Callable[[StepRecord], None]


def align_ground_truth(
    gt: _DensityMap, out_hw: _Tuple[int, int]
) -> _np.ndarray:
    """Bring a ground-truth map to the model's output resolution by
    summing cells.

    Raises:
        ShapeMismatchError: If the map cannot be pooled onto `out_hw`.
    """
    h, w = gt.shape
    oh, ow = out_hw
    if (h, w) == (oh, ow):
        return gt.values
    if h % oh != 0 or w % ow != 0 or h // oh != w // ow:
        raise _ad.ShapeMismatchError(
            f"A {h}x{w} map cannot be pooled onto {oh}x{ow}."
        )
    return _downsample(gt, h // oh).values


def initial_texture(
    channels: int, size: int, seed: int
) -> _np.ndarray:
    """The seeded uniform random start texture."""
    rng = _tools.derive_rng(seed, 0)
    return rng.uniform(0.0, 1.0, (channels, size, size)).astype(_np.float32)


def neutral_texture(
    scenes: _Sequence[AttackScene], size: int
) -> _np.ndarray:
    """A flat texture at the per-channel median of the scene pixels.
    Heads are a minority of the pixels, so the fill matches the
    background.

    Raises:
        ValueError: If `scenes` is empty.
    """
    if len(scenes) == 0:
        raise ValueError("A neutral texture requires at least one scene.")
    pixels = _np.concatenate(
        [image.reshape(image.shape[0], -1) for image, _ in scenes], axis=1
    )
    level = _np.median(pixels, axis=1).astype(_np.float32)
    return _np.broadcast_to(
        level[:, None, None], (level.size, size, size)
    ).copy()


def start_texture(
    scenes: _Sequence[AttackScene], size: int, seed: int, direction: str
) -> _np.ndarray:
    """The default start texture of an attack. Increase attacks start
    from seeded noise. Decrease attacks start from `neutral_texture`, which
    holds no head-like dark pixels.
    """
    if direction == _DECREASE:
        return neutral_texture(scenes, size)
    return initial_texture(scenes[0][0].shape[0], size, seed)


def _step(
    model: _DensityModel,
    image: _np.ndarray,
    gt: _np.ndarray,
    delta: _np.ndarray,
    placement: _Placement,
    layer: str,
    cfg: _AttackConfig
) -> _Tuple[_np.ndarray, float, float, float, float]:
    """Compute the total loss and its gradient w.r.t. the texture."""
    _, h, w = image.shape
    d = _ad.Tensor(delta, requires_grad=True, dtype=model.dtype)
    with _ad.Tape() as tape:
        canvas = _ad.place_patch(
            d, placement.top, placement.left, h, w, placement.rotation
        )
        x_adv = _compose(image, canvas, placement.mask)
        acts = model.activations(x_adv)
        pred = acts["density"]
        if cfg.use_density_weights:
            weights = _weights(gt, pred)
        else:
            weights = _np.ones(pred.shape, dtype=pred.dtype)
        ls = _scale_loss(weights, pred)
        up = _upsample(_attention(model, layer, acts[layer]), (h, w))
        mass = float(up.data[0, 0][placement.mask].sum(dtype=_np.float64))
        if cfg.lam > 0:
            region = placement.mask \
                if cfg.attention_region == _REGION_PATCH else None
            lp = _ad.reduce_sum(up, region)
            total = _ad.add(ls, _ad.mul(lp, cfg.lam))
        else:
            lp = None
            total = ls
    tape.backward(total)
    grad = d.grad if d.grad is not None else _np.zeros_like(delta)
    return (
        grad, ls.item(), 0.0 if lp is None else lp.item(), total.item(),
        mass
    )


def pap_generate(
    model: _DensityModel,
    scenes: _Sequence[AttackScene],
    cfg: _AttackConfig,
    on_step: _Optional[StepCallback] = None,
    init: _Optional[_np.ndarray] = None
) -> _Patch:
    """Optimize a perceptual patch against a source model. Every epoch
    visits the scenes in a seeded order; each visit draws a placement
    and runs `cfg.steps` updates

        delta <- clip(delta +- alpha * grad(L_s + lambda * L_p))

    ascending for increase and descending for decrease attacks. The
    model is not modified.

    Args:
        model (DensityModel): The trained source model.
        scenes (Sequence[AttackScene]): Images with ground-truth maps at
            image or output resolution.
        cfg (AttackConfig): The hyperparameters.
        on_step (Optional[StepCallback]): Receives a record per step.
        init (Optional[ndarray]): The start texture. Defaults to
            `start_texture` for the attack direction.

    Raises:
        AttackDivergedError: If a loss or gradient is not finite.
        PatchPlacementError: If the patch does not fit the images.
        UnknownLayerError: If the attention layer is unknown.
        ValueError: If `scenes` is empty.

    Returns:
        Patch: The optimized patch.
    """
    if len(scenes) == 0:
        raise ValueError("Patch generation requires at least one scene.")
    layer = cfg.attention_layer or model.spec.default_attention_layer
    if layer not in model.resumable_layers:
        raise _UnknownLayerError(layer)

    if init is None:
        delta = start_texture(
            scenes, cfg.patch_size, cfg.seed, cfg.direction
        )
    else:
        delta = _np.clip(_np.asarray(init, dtype=_np.float32), 0.0, 1.0)
    s = model.output_stride
    targets: _List[_np.ndarray] = list()
    for image, gt in scenes:
        _, h, w = image.shape
        targets.append(align_ground_truth(gt, (h // s, w // s)))

    for epoch in range(cfg.epochs):
        order = _tools.derive_rng(cfg.seed, 1, epoch).permutation(len(scenes))
        for idx in order:
            image = scenes[idx][0]
            rng = _tools.derive_rng(cfg.seed, 2, epoch, int(idx))
            placement = _random_placement(
                cfg.shape, cfg.patch_size, image.shape[1:], rng, cfg.rotate
            )
            for t in range(cfg.steps):
                try:
                    grad, ls, lp, total, mass = _step(
                        model, image, targets[idx], delta, placement,
                        layer, cfg
                    )
                except _ad.NonFiniteError as nfe:
                    _logger.exception(
                        "Non-finite value at epoch %s, scene %s, step %s.",
                        epoch, idx, t
                    )
                    raise _exceptions.AttackDivergedError(
                        f"The attack diverged at epoch {epoch}, scene "
                        f"{idx}, step {t}."
                    ) from nfe
                if not _np.isfinite(grad).all():
                    raise _exceptions.AttackDivergedError(
                        f"Non-finite gradient at epoch {epoch}, scene "
                        f"{idx}, step {t}."
                    )
                if on_step is not None:
                    on_step(StepRecord(
                        epoch, int(idx), t, ls, lp, total, mass
                    ))
                step = _np.sign(grad) if cfg.step_rule == _STEP_SIGN \
                    else grad
                delta = _np.clip(
                    delta + cfg.sign * cfg.alpha * step, 0.0, 1.0
                ).astype(_np.float32)
        _logger.info("Patch epoch %s finished.", epoch)
    return _Patch(delta, cfg.shape)
