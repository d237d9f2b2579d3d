import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import List as _List, Sequence as _Sequence, Tuple as _Tuple

from ..attack import INCREASE as _INCREASE, DIRECTIONS as _DIRECTIONS


@_dataclass(frozen=True)
class SceneCounts:
    """The counts of one evaluated scene."""

    __slots__ = ("scene", "count_gt", "count_clean", "count_adv")

    scene: int
    """The index of the scene in the test set."""

    count_gt: float
    count_clean: float
    """The prediction on the clean image."""

    count_adv: float
    """The prediction on the patched image."""


@_dataclass(frozen=True)
class Metrics:
    """Count errors over a set of scenes."""

    __slots__ = ("mae", "mse", "n", "per_scene")

    mae: float
    """The mean absolute count error."""

    mse: float
    """The root of the mean squared count error."""

    n: int
    """The number of scenes."""

    per_scene: _Tuple[SceneCounts, ...]

    def __post_init__(self) -> None:
        """Check the invariants.

        Raises:
            ValueError: If an error is negative or `n` does not match
                the per-scene records.
        """
        if self.mae < 0 or self.mse < 0:
            raise ValueError("Errors must be non-negative.")
        if self.n != len(self.per_scene):
            raise ValueError(
                f"n is {self.n} but there are {len(self.per_scene)} "
                "per-scene records."
            )

    @classmethod
    def from_counts(
        cls, per_scene: _Sequence[SceneCounts], adversarial: bool = True
    ) -> "Metrics":
        """Compute the errors of the adversarial or the clean counts.

        Raises:
            ValueError: If `per_scene` is empty.
        """
        preds = [
            s.count_adv if adversarial else s.count_clean for s in per_scene
        ]
        mae, mse = mae_mse(preds, [s.count_gt for s in per_scene])
        return cls(mae, mse, len(per_scene), tuple(per_scene))


def mae_mse(
    pred_counts: _Sequence[float], gt_counts: _Sequence[float]
) -> _Tuple[float, float]:
    """The mean absolute error and the root mean squared error of
    predicted counts.

    Args:
        pred_counts (Sequence[float]): The predicted counts.
        gt_counts (Sequence[float]): The true counts.

    Raises:
        ValueError: If the sequences are empty or differ in length.

    Returns:
        Tuple[float, float]: MAE and MSE.
    """
    if len(pred_counts) == 0 or len(pred_counts) != len(gt_counts):
        raise ValueError("Expected equally many, and at least one, counts.")
    diff = _np.asarray(pred_counts, dtype=_np.float64) \
        - _np.asarray(gt_counts, dtype=_np.float64)
    mae = float(_np.mean(_np.abs(diff)))
    mse = float(_np.sqrt(_np.mean(diff * diff)))
    return mae, mse


def default_gamma_grid(direction: str = _INCREASE) -> _np.ndarray:
    """0..500 in steps of 10 for increase and 0..200 in steps of 5 for
    decrease attacks.
    """
    if direction not in _DIRECTIONS:
        raise ValueError(f"Unknown direction {direction!r}.")
    if direction == _INCREASE:
        return _np.arange(0, 501, 10, dtype=_np.float64)
    return _np.arange(0, 201, 5, dtype=_np.float64)


def overestimation_curve(
    per_scene: _Sequence[SceneCounts],
    gammas: _Sequence[float],
    direction: str = _INCREASE
) -> _List[_Tuple[float, float]]:
    """For every threshold, the fraction of scenes whose count shift
    exceeds it. The shift is adversarial minus clean prediction for
    increase attacks and the reverse for decrease attacks.

    Args:
        per_scene (Sequence[SceneCounts]): The evaluated scenes.
        gammas (Sequence[float]): The thresholds.
        direction (str, optional): The attack direction.

    Raises:
        ValueError: If `per_scene` is empty or the direction unknown.

    Returns:
        List[Tuple[float, float]]: (gamma, fraction) pairs.
    """
    if len(per_scene) == 0:
        raise ValueError("No scenes to evaluate.")
    if direction not in _DIRECTIONS:
        raise ValueError(f"Unknown direction {direction!r}.")
    shift = _np.array(
        [s.count_adv - s.count_clean for s in per_scene], dtype=_np.float64
    )
    if direction != _INCREASE:
        shift = -shift
    return [
        (float(g), float(_np.mean(shift > g))) for g in gammas
    ]
