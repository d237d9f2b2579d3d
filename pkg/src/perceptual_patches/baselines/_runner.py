"""This module runs the baseline patch attacks with the same scene
order, placements and start texture as the perceptual patch generator.
"""

import dataclasses as _dataclasses
import functools as _functools
import logging as _logging
import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Dict as _Dict, List as _List, \
    Mapping as _Mapping, Sequence as _Sequence

from ._losses import avg_dens_loss as _avg_dens_loss, \
    map_error_loss as _map_error_loss
from ._momentum import MomentumState as _MomentumState, \
    migm_step as _migm_step, nigm_step as _nigm_step
from ._ti import ti_smooth as _ti_smooth, TI_KERNEL_SIZE as \
    _TI_KERNEL_SIZE, TI_SIGMA as _TI_SIGMA
from .. import attack as _attack
from .. import autodiff as _ad
from .. import tools as _tools
from ..models import DensityModel as _DensityModel


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


MIGM = "migm"
NIGM = "nigm"
TI_NIGM = "ti-nigm"
AVG_DENS = "avg-dens"
APAM = "apam"
RANDOM = "random"

METHODS = (MIGM, NIGM, TI_NIGM, AVG_DENS, APAM, RANDOM)
"""All baseline methods."""


@_dataclass(frozen=True)
class BaselineConfig:
    """Hyperparameters of a baseline patch attack."""

    method: str
    """One of `METHODS`."""

    alpha: float = 0.01
    steps: int = 25
    epochs: int = 2
    direction: str = _attack.INCREASE
    seed: int = 0
    patch_size: int = 10
    shape: str = "square"

    mu: float = 1.0
    """The momentum decay of the iterative gradient methods."""

    ti_kernel_size: int = _TI_KERNEL_SIZE
    ti_sigma: float = _TI_SIGMA

    kappa: float = 10.0
    """The ground-truth multiplier of the increase target map of the
    map-fitting attack. Decrease attacks fit the zero map.
    """

    def __post_init__(self) -> None:
        """Validate the config.

        Raises:
            ValueError: If a field is out of range.
        """
        if self.method not in METHODS:
            raise ValueError(f"Unknown baseline method {self.method!r}.")
        if self.alpha <= 0 or self.steps < 1 or self.epochs < 1:
            raise ValueError("alpha, T and epochs must be positive.")
        if self.direction not in _attack.DIRECTIONS:
            raise ValueError(f"Unknown direction {self.direction!r}.")
        if self.mu < 0:
            raise ValueError("The momentum decay must be >= 0.")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0.")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == _attack.INCREASE else -1.0

    def to_json(self) -> _Dict[str, _Any]:
        """Convert to a JSON-serializable dict."""
        return _dataclasses.asdict(self)

    @classmethod
    def from_json(cls, obj: _Mapping[str, _Any]) -> "BaselineConfig":
        """Create from a dict produced by `to_json`."""
        names = {f.name for f in _dataclasses.fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in names})


def _texture_grad(
    models: _Sequence[_DensityModel],
    image: _np.ndarray,
    target: _np.ndarray,
    delta: _np.ndarray,
    placement: _attack.Placement,
    cfg: BaselineConfig
) -> _np.ndarray:
    """The gradient of the method's loss w.r.t. the texture."""
    _, h, w = image.shape
    d = _ad.Tensor(delta, requires_grad=True, dtype=models[0].dtype)
    try:
        with _ad.Tape() as tape:
            canvas = _ad.place_patch(
                d, placement.top, placement.left, h, w, placement.rotation
            )
            x_adv = _attack.compose(image, canvas, placement.mask)
            if cfg.method == APAM:
                goal = cfg.kappa * target \
                    if cfg.direction == _attack.INCREASE \
                    else _np.zeros_like(target)
                loss = _ad.sum_scalars(
                    [_map_error_loss(m, x_adv, goal) for m in models]
                )
            else:
                loss = _avg_dens_loss(models, x_adv)
        tape.backward(loss)
    except _ad.NonFiniteError as nfe:
        raise _attack.AttackDivergedError(
            f"The {cfg.method} attack diverged."
        ) from nfe
    grad = d.grad if d.grad is not None else _np.zeros_like(delta)
    if not _np.isfinite(grad).all():
        raise _attack.AttackDivergedError(
            f"The {cfg.method} attack produced a non-finite gradient."
        )
    return grad


def generate_baseline_patch(
    models: _Sequence[_DensityModel],
    scenes: _Sequence[_attack.AttackScene],
    cfg: BaselineConfig
) -> _attack.Patch:
    """Create a patch with a baseline method against one or more source
    models.

    - migm, nigm, ti-nigm: momentum sign steps on the averaged count.
    - avg-dens: raw gradient steps on the averaged count.
    - apam: raw gradient descent on the squared error to a target map,
      kappa times the ground truth or zero.
    - random: the seeded noise texture without optimization.

    The optimized methods start from `attack.start_texture`.

    Args:
        models (Sequence[DensityModel]): The source models.
        scenes (Sequence[AttackScene]): Images with ground-truth maps.
        cfg (BaselineConfig): The hyperparameters.

    Raises:
        AttackDivergedError: If a gradient is not finite.
        ValueError: If `models` or `scenes` is empty.

    Returns:
        Patch: The patch.
    """
    if len(models) == 0 or len(scenes) == 0:
        raise ValueError("At least one model and one scene are required.")
    if cfg.method == RANDOM:
        delta = _attack.initial_texture(
            scenes[0][0].shape[0], cfg.patch_size, cfg.seed
        )
        return _attack.Patch(delta, cfg.shape)
    delta = _attack.start_texture(
        scenes, cfg.patch_size, cfg.seed, cfg.direction
    )

    s = models[0].output_stride
    targets: _List[_np.ndarray] = list()
    for image, gt in scenes:
        _, h, w = image.shape
        targets.append(_attack.align_ground_truth(gt, (h // s, w // s)))

    transform = None
    if cfg.method == TI_NIGM:
        transform = _functools.partial(
            _ti_smooth, kernel_size=cfg.ti_kernel_size, sigma=cfg.ti_sigma
        )
    state = _MomentumState.zeros(delta.shape, cfg.mu)

    for epoch in range(cfg.epochs):
        order = _tools.derive_rng(cfg.seed, 1, epoch).permutation(len(scenes))
        for idx in order:
            image = scenes[idx][0]
            rng = _tools.derive_rng(cfg.seed, 2, epoch, int(idx))
            placement = _attack.random_placement(
                cfg.shape, cfg.patch_size, image.shape[1:], rng
            )
            grad_fn = _functools.partial(
                _texture_grad, models, image, targets[idx],
                placement=placement, cfg=cfg
            )

            for _ in range(cfg.steps):
                if cfg.method in (NIGM, TI_NIGM):
                    delta = _nigm_step(
                        delta, state, cfg.alpha, grad_fn, cfg.sign,
                        transform
                    )
                elif cfg.method == MIGM:
                    delta = _migm_step(
                        delta, grad_fn(delta), state, cfg.alpha, cfg.sign
                    )
                else:
                    # The map-fitting attack always descends.
                    sign = -1.0 if cfg.method == APAM else cfg.sign
                    delta = _np.clip(
                        delta + sign * cfg.alpha * grad_fn(delta), 0.0, 1.0
                    ).astype(_np.float32)
        _logger.info("%s epoch %s finished.", cfg.method, epoch)
    return _attack.Patch(delta, cfg.shape)
