"""This package contains the transfer attack baselines the perceptual
patch is compared against, and full-image projected gradient ascent.
"""

__all__ = [
    "MomentumState", "GradientTransform", "migm_step", "nigm_step",
    "gaussian_kernel", "ti_smooth", "TI_KERNEL_SIZE", "TI_SIGMA",
    "count_loss", "avg_dens_loss", "map_error_loss",
    "pgd_linf", "PGD_EPSILON", "PGD_ALPHA", "PGD_ITERS",
    "BaselineConfig", "METHODS", "MIGM", "NIGM", "TI_NIGM", "AVG_DENS",
    "APAM", "RANDOM", "generate_baseline_patch"
]

from ._losses import count_loss, avg_dens_loss, map_error_loss
from ._momentum import MomentumState, GradientTransform, migm_step, \
    nigm_step
from ._pgd import pgd_linf, PGD_EPSILON, PGD_ALPHA, PGD_ITERS
from ._runner import BaselineConfig, METHODS, MIGM, NIGM, TI_NIGM, \
    AVG_DENS, APAM, RANDOM, generate_baseline_patch
from ._ti import gaussian_kernel, ti_smooth, TI_KERNEL_SIZE, TI_SIGMA
