import dataclasses as _dataclasses

from dataclasses import dataclass as _dataclass
from typing import Any as _Any, Dict as _Dict, Mapping as _Mapping, \
    Optional as _Optional, Tuple as _Tuple


MAX_STRIDE = 8
"""Image dims must be divisible by the largest model output stride."""


@_dataclass(frozen=True)
class SceneConfig:
    """Parameters of the synthetic crowd scenes."""

    height: int = 96
    width: int = 96

    min_heads: int = 5
    max_heads: int = 40

    min_radius: float = 2.0
    """The smallest head radius in pixels."""

    max_radius: float = 4.0
    """The largest head radius in pixels."""

    test_radius: _Optional[_Tuple[float, float]] = None
    """A separate head radius range of the test split, or None to use
    the train range.
    """

    distractors: int = 0
    """The maximum number of unannotated clutter blobs per scene."""

    negative_fraction: float = 0.0
    """The fraction of scenes rendered without heads."""

    train_size: int = 64
    test_size: int = 32

    sigma_const: float = 4.0
    """The kernel width of scenes with too few heads for adaptive
    kernels.
    """

    max_retries: int = 200
    """The placement attempts per head."""

    def __post_init__(self) -> None:
        """Validate the config.

        Raises:
            ValueError: If a field is out of range.
        """
        if self.height <= 0 or self.width <= 0 \
                or self.height % MAX_STRIDE or self.width % MAX_STRIDE:
            raise ValueError(
                f"Image dims must be positive multiples of {MAX_STRIDE}, "
                f"got {self.height}x{self.width}."
            )
        if not 0 <= self.min_heads <= self.max_heads:
            raise ValueError("Head counts must satisfy 0 <= min <= max.")
        for lo, hi in (self.radius_range(False), self.radius_range(True)):
            if not 0 < lo <= hi:
                raise ValueError("Radius ranges must be positive.")
            if 2 * hi >= min(self.height, self.width):
                raise ValueError("Heads must be smaller than the image.")
        if self.distractors < 0:
            raise ValueError("distractors must be >= 0.")
        if not 0 <= self.negative_fraction <= 1:
            raise ValueError("negative_fraction must be in [0, 1].")
        if self.train_size < 0 or self.test_size < 0:
            raise ValueError("Split sizes must be >= 0.")
        if self.sigma_const <= 0 or self.max_retries < 1:
            raise ValueError("sigma_const and max_retries must be positive.")

    def radius_range(self, test: bool) -> _Tuple[float, float]:
        """The head radius range of a split."""
        if test and self.test_radius is not None:
            return (float(self.test_radius[0]), float(self.test_radius[1]))
        return (self.min_radius, self.max_radius)

    def replace(self, **changes: _Any) -> "SceneConfig":
        """Create a copy with some fields replaced."""
        return _dataclasses.replace(self, **changes)

    def to_json(self) -> _Dict[str, _Any]:
        """Convert to a JSON-serializable dict."""
        obj = _dataclasses.asdict(self)
        if self.test_radius is not None:
            obj["test_radius"] = list(self.test_radius)
        return obj

    @classmethod
    def from_json(cls, obj: _Mapping[str, _Any]) -> "SceneConfig":
        """Create from a dict produced by `to_json`."""
        kw = dict(obj)
        if kw.get("test_radius") is not None:
            kw["test_radius"] = tuple(kw["test_radius"])
        return cls(**kw)


PRESETS: _Dict[str, SceneConfig] = {
    "standard": SceneConfig(),
    "scale-shift": SceneConfig(
        min_radius=1.5, max_radius=2.5, test_radius=(1.5, 5.0)
    ),
    "clutter": SceneConfig(distractors=6, negative_fraction=0.25),
}
"""The named scene suites."""


def preset(name: str) -> SceneConfig:
    """Look up a preset.

    Raises:
        KeyError: If the name is unknown.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"Unknown preset {name!r}, expected one of {sorted(PRESETS)}."
        ) from None
