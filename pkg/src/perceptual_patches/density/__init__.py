"""This package builds ground-truth density maps from point annotations
and aligns them across resolutions.
"""

__all__ = [
    "PointSet", "DensityMap", "AnnotationError",
    "ADAPTIVE", "CONSTANT", "ADAPTIVE_MIN_POINTS",
    "knn_avg_distance", "gaussian_window", "gen_density_map",
    "downsample_preserving_sum"
]

from ._exceptions import AnnotationError
from ._kernels import ADAPTIVE, CONSTANT, ADAPTIVE_MIN_POINTS, \
    knn_avg_distance, gaussian_window, gen_density_map, \
    downsample_preserving_sum
from ._types import PointSet, DensityMap
