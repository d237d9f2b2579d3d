"""This package contains the readers and writers of the binary and text
file formats: weights, density maps, patches, PPM images and
annotations.
"""

__all__ = [
    "FormatError",
    "WEIGHTS_MAGIC", "write_weights", "read_weights",
    "DENSITY_MAGIC", "write_density", "read_density",
    "PATCH_MAGIC", "SHAPE_CODES", "write_patch", "read_patch",
    "to_uint8", "write_ppm", "read_ppm",
    "AnnotationRecord", "write_annotations", "read_annotations"
]

from ._annotations import AnnotationRecord, write_annotations, \
    read_annotations
from ._density import DENSITY_MAGIC, write_density, read_density
from ._exceptions import FormatError
from ._patch import PATCH_MAGIC, SHAPE_CODES, write_patch, read_patch
from ._ppm import to_uint8, write_ppm, read_ppm
from ._weights import WEIGHTS_MAGIC, write_weights, read_weights
