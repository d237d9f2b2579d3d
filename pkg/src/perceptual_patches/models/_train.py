"""This module contains the training of the density models on the half
mean squared map error.
"""

import logging as _logging
import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Callable as _Callable, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple

from . import _exceptions
from ._base import DensityModel as _DensityModel
from ._sgd import SGD as _SGD
from ._spec import TrainConfig as _TrainConfig
from .. import autodiff as _ad
from .. import tools as _tools
from ..density import DensityMap as _DensityMap


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


TrainSample = _Tuple[_np.ndarray, _DensityMap]
"""An image of shape [C, H, W] with its ground-truth map at the model's
output resolution.
"""

EpochCallback = _Callable[[int, float], None]
"""Receives the epoch index and its mean loss."""


@_dataclass(frozen=True)
class TrainResult:
    """The outcome of `train`."""

    __slots__ = ("model", "losses")

    model: _DensityModel
    """The trained model, which is the instance passed in."""

    losses: _Tuple[float, ...]
    """The mean batch loss of every epoch."""


def density_loss(
    preds: _Sequence[_ad.Tensor], targets: _Sequence[_np.ndarray]
) -> _ad.Tensor:
    """The map regression loss 1 / (2N) * sum_i ||pred_i - target_i||^2.

    Args:
        preds (Sequence[Tensor]): The N predicted maps.
        targets (Sequence[ndarray]): The N ground-truth maps with the
            same number of cells as the predictions.

    Raises:
        ShapeMismatchError: If a target does not match its prediction.
        ValueError: If no prediction is given or the counts differ.

    Returns:
        Tensor: The scalar loss.
    """
    if len(preds) == 0 or len(preds) != len(targets):
        raise ValueError("Expected equally many, and at least one, maps.")
    terms = list()
    for pred, target in zip(preds, targets):
        t = _np.asarray(target)
        if t.size != pred.size or t.shape[-2:] != pred.shape[-2:]:
            raise _ad.ShapeMismatchError(
                f"Target of shape {t.shape} does not match prediction "
                f"of shape {pred.shape}."
            )
        diff = _ad.sub(pred, t.reshape(pred.shape))
        terms.append(_ad.reduce_sum(_ad.mul(diff, diff)))
    return _ad.mul(_ad.sum_scalars(terms), 1.0 / (2.0 * len(preds)))


def batches(
    n: int, batch_size: int, seed: int, epoch: int
) -> _List[_np.ndarray]:
    """Split a seeded permutation of range(n) into batches. The
    permutation depends only on (seed, epoch).
    """
    order = _tools.derive_rng(seed, epoch).permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


def evaluate_loss(
    model: _DensityModel, dataset: _Sequence[TrainSample]
) -> float:
    """Compute the map regression loss over a whole dataset without
    updating the model.

    Raises:
        ValueError: If the dataset is empty.
    """
    if len(dataset) == 0:
        raise ValueError("The dataset is empty.")
    preds = [model.forward(img) for img, _ in dataset]
    return density_loss(preds, [gt.values for _, gt in dataset]).item()


def train(
    model: _DensityModel,
    dataset: _Sequence[TrainSample],
    cfg: _TrainConfig,
    on_epoch: _Optional[EpochCallback] = None,
    stop_check: _Optional[_Callable[[], bool]] = None
) -> TrainResult:
    """Fit a model in place with momentum SGD on the map regression
    loss. Scenes are shuffled per epoch with a stream derived from the
    config seed, so a fixed seed yields bit-identical parameters.

    Args:
        model (DensityModel): The model, updated in place.
        dataset (Sequence[TrainSample]): The training scenes.
        cfg (TrainConfig): The hyperparameters.
        on_epoch (Optional[EpochCallback]): Called after every epoch.
        stop_check (Optional[Callable[[], bool]]): Evaluated after every
            epoch; training ends early once it returns True.

    Raises:
        ShapeMismatchError: If a ground-truth map does not match the
            output resolution.
        TrainingDivergedError: If the loss or a parameter becomes NaN
            or infinite.
        ValueError: If the dataset is empty.

    Returns:
        TrainResult: The model and its loss curve.
    """
    if len(dataset) == 0:
        raise ValueError("The dataset is empty.")
    opt = _SGD(
        model.parameters(), cfg.learning_rate, cfg.momentum, cfg.grad_clip
    )
    losses: _List[float] = list()
    model.set_requires_grad(True)
    try:
        for epoch in range(cfg.epochs):
            total = 0.0
            parts = batches(len(dataset), cfg.batch_size, cfg.seed, epoch)
            for b, idx in enumerate(parts):
                try:
                    with _ad.Tape() as tape:
                        preds = [model.forward(dataset[i][0]) for i in idx]
                        loss = density_loss(
                            preds, [dataset[i][1].values for i in idx]
                        )
                    tape.backward(loss)
                except _ad.NonFiniteError as nfe:
                    _logger.error(
                        "Non-finite value in epoch %s, batch %s.", epoch, b
                    )
                    raise _exceptions.TrainingDivergedError(
                        f"Training diverged in epoch {epoch}, batch {b}."
                    ) from nfe
                total += loss.item()
                opt.step()
            if not all(_np.isfinite(p.data).all() for p in model):
                raise _exceptions.TrainingDivergedError(
                    f"Parameters became non-finite in epoch {epoch}."
                )
            mean = total / len(parts)
            losses.append(mean)
            _logger.info("Epoch %s: loss %.6g", epoch, mean)
            if on_epoch is not None:
                on_epoch(epoch, mean)
            if stop_check is not None and stop_check():
                _logger.info("Stopping early after epoch %s.", epoch)
                break
    finally:
        model.set_requires_grad(False)
    return TrainResult(model, tuple(losses))
