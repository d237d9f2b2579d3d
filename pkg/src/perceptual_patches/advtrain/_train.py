"""This module contains the two adversarial training recipes."""

import concurrent.futures as _futures
import logging as _logging
import numpy as _np

from dataclasses import dataclass as _dataclass
from datetime import timedelta as _timedelta
from typing import Callable as _Callable, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple

from ._budget import TimeBudget as _TimeBudget
from ._config import AdvTrainConfig as _AdvTrainConfig, OAT as _OAT, \
    IAT as _IAT
from ._schedule import lambda_schedule as _lambda_schedule
from .. import attack as _attack
from .. import autodiff as _ad
from .. import models as _models
from .. import tools as _tools


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


PatchProvider = _Callable[
    [_models.DensityModel, _Sequence[_attack.AttackScene],
     _attack.AttackConfig],
    _attack.Patch
]
"""Creates a patch for a model and scenes, `attack.pap_generate` by
default.
"""


@_dataclass(frozen=True)
class AdvTrainResult:
    """The outcome of adversarial training."""

    __slots__ = ("model", "variant", "losses", "wall_clock", "stopped_early")

    model: _models.DensityModel
    """The enhanced model, a copy of the input model."""

    variant: str
    losses: _Tuple[float, ...]
    """The mean loss per completed epoch."""

    wall_clock: _timedelta
    """The total time including patch generation."""

    stopped_early: bool
    """Whether the time budget ended training."""


def _patch_seed(seed: int, *keys: int) -> int:
    return int(_tools.derive_rng(seed, *keys).integers(0, 2 ** 31))


def _adversarial_copy(
    model: _models.DensityModel,
    sample: _models.TrainSample,
    cfg: _attack.AttackConfig,
    provider: PatchProvider
) -> _models.TrainSample:
    """Patch one scene with its own white-box patch."""
    image, gt = sample
    patch = provider(model, [(image, gt)], cfg)
    rng = _tools.derive_rng(cfg.seed, 4)
    placement = _attack.random_placement(
        patch.shape, patch.size, image.shape[1:], rng, cfg.rotate
    )
    return (_attack.apply_patch(image, patch, placement), gt)


def make_adversarial_set(
    model: _models.DensityModel,
    scenes: _Sequence[_models.TrainSample],
    attack_cfg: _attack.AttackConfig,
    seed: int,
    jobs: int = 1,
    provider: _Optional[PatchProvider] = None,
    epoch: int = 0
) -> _List[_models.TrainSample]:
    """Create one patched copy of every scene, each with an independent
    patch optimized against `model` with a seed derived from (seed,
    epoch, index).

    Args:
        model (DensityModel): The model to attack. It is not modified.
        scenes (Sequence[TrainSample]): The clean scenes.
        attack_cfg (AttackConfig): The attack; its seed is replaced.
        seed (int): The root seed.
        jobs (int, optional): The number of worker threads.
        provider (Optional[PatchProvider]): Creates the patches.
            Defaults to `attack.pap_generate`.
        epoch (int, optional): Separates the seeds of repeated calls.

    Returns:
        List[TrainSample]: The patched scenes in input order.
    """
    make = provider or _attack.pap_generate
    cfgs = [
        attack_cfg.replace(seed=_patch_seed(seed, 3, epoch, i))
        for i in range(len(scenes))
    ]
    if jobs <= 1:
        return [
            _adversarial_copy(model, s, c, make) for s, c in zip(scenes, cfgs)
        ]
    with _futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(
            lambda sc: _adversarial_copy(model, sc[0], sc[1], make),
            zip(scenes, cfgs)
        ))


def _mix(
    clean: _Sequence[_models.TrainSample],
    adv: _Sequence[_models.TrainSample],
    cfg: _AdvTrainConfig
) -> _List[_models.TrainSample]:
    return list(clean) * cfg.mix_clean + list(adv) * cfg.mix_adv


def oat_train(
    pretrained: _models.DensityModel,
    scenes: _Sequence[_models.TrainSample],
    cfg: _AdvTrainConfig,
    provider: _Optional[PatchProvider] = None,
    on_epoch: _Optional[_models.EpochCallback] = None
) -> AdvTrainResult:
    """Once-generated adversarial training. Every scene is patched once
    against the pretrained model; a copy of the model is then trained
    on the clean and patched scenes mixed at the configured ratio.

    Args:
        pretrained (DensityModel): The vanilla model. It is not
            modified.
        scenes (Sequence[TrainSample]): The clean training scenes.
        cfg (AdvTrainConfig): The hyperparameters.
        provider (Optional[PatchProvider]): Creates the patches.
        on_epoch (Optional[EpochCallback]): Called after every epoch.

    Raises:
        TrainingDivergedError: If training diverges.
        ValueError: If `scenes` is empty.

    Returns:
        AdvTrainResult: The enhanced model.
    """
    if len(scenes) == 0:
        raise ValueError("The dataset is empty.")
    budget = _TimeBudget(cfg.time_budget)
    budget.start()
    adv = make_adversarial_set(
        pretrained, scenes, cfg.inner_attack, cfg.seed, cfg.jobs, provider
    )
    _logger.info(
        "Generated %s adversarial scenes in %s.", len(adv), budget.elapsed
    )
    dataset = _mix(scenes, adv, cfg)
    model = pretrained.copy()
    result = _models.train(
        model, dataset, cfg.train.replace(epochs=cfg.epochs),
        on_epoch=on_epoch, stop_check=budget.check
    )
    return AdvTrainResult(
        model, _OAT, result.losses, budget.elapsed, budget.expired
    )


def iat_loss(
    model: _models.DensityModel,
    clean: _Sequence[_models.TrainSample],
    adv: _Sequence[_models.TrainSample],
    lam: float
) -> _ad.Tensor:
    """The combined loss lam * L_clean + (1 - lam) * L_adv. The
    adversarial term is left out entirely when lam is 1.
    """
    l_clean = _models.density_loss(
        [model.forward(x) for x, _ in clean], [gt.values for _, gt in clean]
    )
    if lam >= 1.0 or len(adv) == 0:
        return l_clean
    l_adv = _models.density_loss(
        [model.forward(x) for x, _ in adv], [gt.values for _, gt in adv]
    )
    return _ad.add(_ad.mul(l_clean, lam), _ad.mul(l_adv, 1.0 - lam))


def iat_train(
    model: _models.DensityModel,
    scenes: _Sequence[_models.TrainSample],
    cfg: _AdvTrainConfig,
    provider: _Optional[PatchProvider] = None,
    on_epoch: _Optional[_models.EpochCallback] = None
) -> AdvTrainResult:
    """Iterative adversarial training. Every batch is patched with fresh
    white-box patches against the current model, and a copy of the
    model is updated on lam * L_clean + (1 - lam) * L_adv with lam from
    `lambda_schedule`. The terms are weighted by lam alone; the mix
    ratio of OAT does not apply, except that `mix_adv` 0 leaves out the
    adversarial term.
    Args:
        model (DensityModel): The start model. It is not modified.
        scenes (Sequence[TrainSample]): The clean training scenes.
        cfg (AdvTrainConfig): The hyperparameters.
        provider (Optional[PatchProvider]): Creates the patches.
        on_epoch (Optional[EpochCallback]): Called after every epoch.

    Raises:
        TrainingDivergedError: If training diverges.
        ValueError: If `scenes` is empty.

    Returns:
        AdvTrainResult: The enhanced model.
    """
    if len(scenes) == 0:
        raise ValueError("The dataset is empty.")
    budget = _TimeBudget(cfg.time_budget)
    budget.start()
    model = model.copy()
    tcfg = cfg.train
    opt = _models.SGD(
        model.parameters(), tcfg.learning_rate, tcfg.momentum, tcfg.grad_clip
    )
    losses: _List[float] = list()
    for epoch in range(cfg.epochs):
        lam = _lambda_schedule(epoch, cfg.epochs)
        parts = _models.batches(
            len(scenes), tcfg.batch_size, tcfg.seed, epoch
        )
        total = 0.0
        for b, idx in enumerate(parts):
            clean = [scenes[i] for i in idx]
            adv: _List[_models.TrainSample] = list()
            if lam < 1.0 and cfg.mix_adv > 0:
                adv = make_adversarial_set(
                    model, clean, cfg.inner_attack, cfg.seed,
                    provider=provider, epoch=epoch * len(parts) + b + 1
                )
            model.set_requires_grad(True)
            try:
                with _ad.Tape() as tape:
                    loss = iat_loss(model, clean, adv, lam)
                tape.backward(loss)
            except _ad.NonFiniteError as nfe:
                raise _models.TrainingDivergedError(
                    f"Training diverged in epoch {epoch}, batch {b}."
                ) from nfe
            total += loss.item()
            opt.step()
            model.set_requires_grad(False)
        if not all(_np.isfinite(p.data).all() for p in model):
            raise _models.TrainingDivergedError(
                f"Parameters became non-finite in epoch {epoch}."
            )
        mean = total / len(parts)
        losses.append(mean)
        _logger.info("Epoch %s (lambda %.3f): loss %.6g", epoch, lam, mean)
        if on_epoch is not None:
            on_epoch(epoch, mean)
        if budget.check():
            break
    return AdvTrainResult(
        model, _IAT, tuple(losses), budget.elapsed, budget.expired
    )


def adversarial_train(
    model: _models.DensityModel,
    scenes: _Sequence[_models.TrainSample],
    cfg: _AdvTrainConfig,
    provider: _Optional[PatchProvider] = None,
    on_epoch: _Optional[_models.EpochCallback] = None
) -> AdvTrainResult:
    """Dispatch to `oat_train` or `iat_train` by `cfg.variant`."""
    fn = oat_train if cfg.variant == _OAT else iat_train
    return fn(model, scenes, cfg, provider, on_epoch)
