import logging as _logging
import numpy as _np

from typing import Callable as _Callable, Optional as _Optional

from ._losses import map_error_loss as _map_error_loss
from .. import autodiff as _ad
from ..models import DensityModel as _DensityModel


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


PGD_EPSILON = 8.0 / 255.0
PGD_ALPHA = 0.002
PGD_ITERS = 20


def pgd_linf(
    model: _DensityModel,
    x: _np.ndarray,
    target: _np.ndarray,
    eps: float = PGD_EPSILON,
    alpha: float = PGD_ALPHA,
    iters: int = PGD_ITERS,
    on_iter: _Optional[_Callable[[int, _np.ndarray], None]] = None
) -> _np.ndarray:
    """Full-image L-infinity projected gradient ascent on the squared map
    error. After every iteration the image lies within the eps-ball
    around `x` and within [0, 1].

    Args:
        model (DensityModel): The attacked model.
        x (ndarray): The clean image of shape [C, H, W].
        target (ndarray): The ground-truth map at output resolution.
        eps (float, optional): The ball radius. Defaults to 8/255.
        alpha (float, optional): The step size. Defaults to 0.002.
        iters (int, optional): The number of steps. Defaults to 20.
        on_iter (Optional[Callable[[int, ndarray], None]]): Receives the
            iteration index and the current image.

    Raises:
        ValueError: If eps is negative, alpha not positive or iters
            negative.

    Returns:
        ndarray: The adversarial image in float64.
    """
    if eps < 0 or alpha <= 0 or iters < 0:
        raise ValueError(
            f"Invalid PGD parameters eps={eps}, alpha={alpha}, "
            f"iters={iters}."
        )
    x0 = _np.asarray(x, dtype=_np.float64)
    lo = _np.clip(x0 - eps, 0.0, 1.0)
    hi = _np.clip(x0 + eps, 0.0, 1.0)
    x_adv = x0.copy()
    for i in range(iters):
        leaf = _ad.Tensor(x_adv[None], requires_grad=True, dtype=model.dtype)
        with _ad.Tape() as tape:
            loss = _map_error_loss(model, leaf, target)
        tape.backward(loss)
        grad = leaf.grad[0] if leaf.grad is not None \
            else _np.zeros_like(x_adv)
        x_adv = _np.clip(x_adv + alpha * _np.sign(grad), lo, hi)
        _logger.debug("PGD iteration %s: map error %.6g", i, loss.item())
        if on_iter is not None:
            on_iter(i, x_adv)
    return x_adv
