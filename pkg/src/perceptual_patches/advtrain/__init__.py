"""This package hardens density models by training on patched scenes,
either with patches generated once against the pretrained model or with
patches regenerated against the current model during training.
"""

__all__ = [
    "AdvTrainConfig", "OAT", "IAT", "VARIANTS", "MIN_EPOCHS",
    "default_attack", "lambda_schedule", "WARMUP_END", "DECAY_END",
    "LAMBDA_FLOOR", "TimeBudget",
    "AdvTrainResult", "PatchProvider", "make_adversarial_set",
    "oat_train", "iat_loss", "iat_train", "adversarial_train"
]

from ._budget import TimeBudget
from ._config import AdvTrainConfig, OAT, IAT, VARIANTS, MIN_EPOCHS, \
    default_attack
from ._schedule import lambda_schedule, WARMUP_END, DECAY_END, \
    LAMBDA_FLOOR
from ._train import AdvTrainResult, PatchProvider, make_adversarial_set, \
    oat_train, iat_loss, iat_train, adversarial_train
