import numpy as _np

from typing import Sequence as _Sequence, Union as _Union

from .. import autodiff as _ad
from ..models import DensityModel as _DensityModel


ImageLike = _Union[_ad.Tensor, _np.ndarray]


def count_loss(model: _DensityModel, x_adv: ImageLike) -> _ad.Tensor:
    """The predicted count as a differentiable scalar."""
    return _ad.reduce_sum(model.forward(x_adv))


def avg_dens_loss(
    models: _Sequence[_DensityModel], x_adv: ImageLike
) -> _ad.Tensor:
    """The predicted count averaged over an ensemble of models.

    Raises:
        ValueError: If `models` is empty.
    """
    if len(models) == 0:
        raise ValueError("At least one model is required.")
    counts = [count_loss(m, x_adv) for m in models]
    return _ad.mul(_ad.sum_scalars(counts), 1.0 / len(counts))


def map_error_loss(
    model: _DensityModel, x_adv: ImageLike, target: _np.ndarray
) -> _ad.Tensor:
    """The squared map error ||F(x) - target||^2.

    Raises:
        ShapeMismatchError: If the target has a different size.
    """
    pred = model.forward(x_adv)
    t = _np.asarray(target)
    if t.size != pred.size or t.shape[-2:] != pred.shape[-2:]:
        raise _ad.ShapeMismatchError(
            f"Target of shape {t.shape} does not match prediction of "
            f"shape {pred.shape}."
        )
    diff = _ad.sub(pred, t.reshape(pred.shape).astype(pred.dtype))
    return _ad.reduce_sum(_ad.mul(diff, diff))
