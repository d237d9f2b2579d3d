"""This package contains a minimal reverse-mode differentiable tensor
engine. Operations executed inside an active `Tape` context on tensors
requiring a gradient are recorded, and `backward` replays them in
reverse order.
"""

__all__ = [
    "Tensor", "DEFAULT_DTYPE",
    "Tape", "active_tape", "backward",
    "conv2d", "elementwise", "add", "sub", "mul", "activation", "relu",
    "sigmoid", "maxpool2", "upsample_bilinear", "reduce_sum",
    "concat_channels", "clip", "place_patch", "sum_scalars",
    "GradientCheck", "check_gradient", "relative_error",
    "AutodiffError", "ShapeMismatchError", "NonFiniteError",
    "NoTapeError", "TapeConsumedError", "NonScalarError"
]

from ._exceptions import AutodiffError, ShapeMismatchError, \
    NonFiniteError, NoTapeError, TapeConsumedError, NonScalarError
from ._gradcheck import GradientCheck, check_gradient, relative_error
from ._ops import conv2d, elementwise, add, sub, mul, activation, relu, \
    sigmoid, maxpool2, upsample_bilinear, reduce_sum, concat_channels, \
    clip, place_patch, sum_scalars
from ._tape import Tape, active_tape, backward
from ._tensor import Tensor, DEFAULT_DTYPE
