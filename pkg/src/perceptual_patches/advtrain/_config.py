import dataclasses as _dataclasses

from dataclasses import dataclass as _dataclass
from datetime import timedelta as _timedelta
from typing import Any as _Any, Dict as _Dict, Mapping as _Mapping, \
    Optional as _Optional

from ..attack import AttackConfig as _AttackConfig
from ..models import TrainConfig as _TrainConfig


OAT = "oat"
"""Once-generated adversarial training: patches are made once against
the pretrained model and mixed into a fixed training set.
"""

IAT = "iat"
"""Iterative adversarial training: patches are regenerated against the
current model every epoch.
"""

VARIANTS = (OAT, IAT)

MIN_EPOCHS = 4
"""The smallest E for which every schedule phase is non-empty."""


@_dataclass(frozen=True)
class AdvTrainConfig:
    """Hyperparameters of adversarial training."""

    variant: str = OAT
    """One of `VARIANTS`."""

    epochs: int = 8
    """The total number of epochs E."""

    mix_adv: int = 1
    """The adversarial part of the adversarial to clean ratio of OAT.
    IAT only uses it to switch the adversarial term off with 0.
    """

    mix_clean: int = 1
    """The clean part of the adversarial to clean ratio of OAT."""

    train: _TrainConfig = _TrainConfig()
    """The optimizer settings. Its epoch count is ignored."""

    attack: _Optional[_AttackConfig] = None
    """The inner attack. None selects `default_attack(variant)`."""

    seed: int = 0
    """The seed from which patch seeds are derived."""

    time_budget: _Optional[_timedelta] = None
    """A soft wall-clock limit checked after every epoch."""

    jobs: int = 1
    """The number of threads generating the patches of OAT."""

    def __post_init__(self) -> None:
        """Validate the config.

        Raises:
            ValueError: If a field is out of range.
        """
        if self.variant not in VARIANTS:
            raise ValueError(f"Unknown variant {self.variant!r}.")
        if self.epochs < MIN_EPOCHS:
            raise ValueError(
                f"E must be >= {MIN_EPOCHS}, got {self.epochs}."
            )
        if self.mix_adv < 0 or self.mix_clean < 0 \
                or self.mix_adv + self.mix_clean == 0:
            raise ValueError("The mix ratio needs a positive component.")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1.")

    @property
    def inner_attack(self) -> _AttackConfig:
        """The effective inner attack config."""
        return self.attack or default_attack(self.variant)

    def replace(self, **changes: _Any) -> "AdvTrainConfig":
        """Create a copy with some fields replaced."""
        return _dataclasses.replace(self, **changes)

    def to_json(self) -> _Dict[str, _Any]:
        """Convert to a JSON-serializable dict."""
        return {
            "variant": self.variant,
            "epochs": self.epochs,
            "mix_adv": self.mix_adv,
            "mix_clean": self.mix_clean,
            "train": self.train.to_json(),
            "attack": self.inner_attack.to_json(),
            "seed": self.seed,
            "time_budget": None if self.time_budget is None
            else self.time_budget.total_seconds(),
            "jobs": self.jobs,
        }

    @classmethod
    def from_json(cls, obj: _Mapping[str, _Any]) -> "AdvTrainConfig":
        """Create from a dict produced by `to_json`."""
        budget = obj.get("time_budget")
        return cls(
            variant=obj.get("variant", OAT),
            epochs=int(obj.get("epochs", 8)),
            mix_adv=int(obj.get("mix_adv", 1)),
            mix_clean=int(obj.get("mix_clean", 1)),
            train=_TrainConfig.from_json(obj.get("train", {})),
            attack=None if obj.get("attack") is None
            else _AttackConfig.from_json(obj["attack"]),
            seed=int(obj.get("seed", 0)),
            time_budget=None if budget is None
            else _timedelta(seconds=budget),
            jobs=int(obj.get("jobs", 1)),
        )


def default_attack(variant: str) -> _AttackConfig:
    """The inner attack used when none is configured: the standard
    perceptual patch for OAT and a short five step attack for IAT.
    """
    if variant == IAT:
        return _AttackConfig(steps=5, epochs=1)
    return _AttackConfig()
