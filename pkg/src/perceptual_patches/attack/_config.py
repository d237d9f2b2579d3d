import dataclasses as _dataclasses

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Dict as _Dict, Mapping as _Mapping, \
    Optional as _Optional


INCREASE = "increase"
"""Drive the predicted count up (gradient ascent)."""

DECREASE = "decrease"
"""Drive the predicted count down (gradient descent)."""

DIRECTIONS = (INCREASE, DECREASE)

SHAPES = ("square", "circle", "trapezoid")
"""The supported patch footprints."""

REGION_PATCH = "patch"
"""The position loss sums attention over the patch footprint."""

REGION_WHOLE = "whole"
"""The position loss sums attention over the whole map."""

STEP_RAW = "raw"
"""Update with the raw gradient scaled by the step size."""

STEP_SIGN = "sign"
"""Update with the sign of the gradient scaled by the step size."""


@_dataclass(frozen=True)
class AttackConfig:
    """Hyperparameters of perceptual patch generation."""

    lam: float = 0.01
    """The weight of the position perception loss."""

    alpha: float = 0.01
    """The step size."""

    steps: int = 25
    """The number of inner iterations per scene."""

    epochs: int = 2
    """The number of passes over the scenes."""

    direction: str = INCREASE
    """One of `DIRECTIONS`."""

    seed: int = 0
    """Determines the initial texture, the scene order and the
    placements.
    """

    attention_layer: _Optional[str] = None
    """The source model layer the attention is computed at. None selects
    the model's default, the last activation before the density head.
    """

    patch_size: int = 10
    """The patch side P in pixels."""

    shape: str = "square"
    """One of `SHAPES`."""

    rotate: bool = False
    """Whether placements rotate the texture by a random multiple of 90
    degrees.
    """

    use_density_weights: bool = True
    """Whether the scale loss weights the prediction by W. If False, W
    is all ones and the scale loss is the predicted count.
    """

    attention_region: str = REGION_PATCH
    """Either `REGION_PATCH` or `REGION_WHOLE`."""

    step_rule: str = STEP_RAW
    """Either `STEP_RAW` or `STEP_SIGN`."""

    def __post_init__(self) -> None:
        """Validate the config.

        Raises:
            ValueError: If a field is out of range.
        """
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}.")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}.")
        if self.steps < 1:
            raise ValueError(f"T must be >= 1, got {self.steps}.")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}.")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"Unknown direction {self.direction!r}.")
        if self.patch_size < 1:
            raise ValueError("The patch size must be positive.")
        if self.shape not in SHAPES:
            raise ValueError(f"Unknown patch shape {self.shape!r}.")
        if self.attention_region not in (REGION_PATCH, REGION_WHOLE):
            raise ValueError(
                f"Unknown attention region {self.attention_region!r}."
            )
        if self.step_rule not in (STEP_RAW, STEP_SIGN):
            raise ValueError(f"Unknown step rule {self.step_rule!r}.")

    @property
    def sign(self) -> float:
        """+1 for increase attacks, -1 for decrease attacks."""
        return 1.0 if self.direction == INCREASE else -1.0

    def replace(self, **changes: _Any) -> "AttackConfig":
        """Create a copy with some fields replaced."""
        return _dataclasses.replace(self, **changes)

    def to_json(self) -> _Dict[str, _Any]:
        """Convert to a JSON-serializable dict."""
        return _dataclasses.asdict(self)

    @classmethod
    def from_json(cls, obj: _Mapping[str, _Any]) -> "AttackConfig":
        """Create from a dict produced by `to_json`. Unknown keys are
        ignored.
        """
        names = {f.name for f in _dataclasses.fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in names})
