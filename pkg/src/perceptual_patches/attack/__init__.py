"""This package contains the perceptual adversarial patch generator:
patch masks and composition, the density weighted scale loss, the
attention based position loss and their joint optimization.
"""

__all__ = [
    "AttackConfig", "INCREASE", "DECREASE", "DIRECTIONS", "SHAPES",
    "REGION_PATCH", "REGION_WHOLE", "STEP_RAW", "STEP_SIGN",
    "Placement", "footprint", "make_mask", "random_placement",
    "Patch", "apply_patch", "load_patch_meta",
    "compose", "density_weights", "scale_loss", "channel_weights",
    "attention_from_activation", "attention_map", "upsample_attention",
    "position_loss",
    "AttackScene", "StepRecord", "StepCallback", "align_ground_truth",
    "initial_texture", "neutral_texture", "start_texture", "pap_generate",
    "PatchPlacementError", "AttackDivergedError"
]

from ._config import AttackConfig, INCREASE, DECREASE, DIRECTIONS, \
    SHAPES, REGION_PATCH, REGION_WHOLE, STEP_RAW, STEP_SIGN
from ._exceptions import PatchPlacementError, AttackDivergedError
from ._generate import AttackScene, StepRecord, StepCallback, \
    align_ground_truth, initial_texture, neutral_texture, start_texture, \
    pap_generate
from ._losses import compose, density_weights, scale_loss, \
    channel_weights, attention_from_activation, attention_map, \
    upsample_attention, position_loss
from ._mask import Placement, footprint, make_mask, random_placement
from ._patch import Patch, apply_patch, load_patch_meta
