"""This package contains the toy density map estimation networks, a
multi-column and a single-column family, and their training.
"""

__all__ = [
    "ModelSpec", "TrainConfig", "MULTI_COLUMN", "SINGLE_COLUMN",
    "FAMILIES", "DEFAULT_WIDTHS",
    "DensityModel", "ConvLayer", "Activations",
    "MultiColumnModel", "SingleColumnModel", "BRANCH_KERNELS",
    "build_model", "save_checkpoint", "load_checkpoint", "sidecar_path",
    "SGD", "TrainResult", "TrainSample", "EpochCallback", "batches",
    "density_loss", "evaluate_loss", "train",
    "TrainingDivergedError", "UnknownLayerError"
]

from ._base import DensityModel, ConvLayer, Activations
from ._build import build_model, save_checkpoint, load_checkpoint, \
    sidecar_path
from ._exceptions import TrainingDivergedError, UnknownLayerError
from ._multi_column import MultiColumnModel, BRANCH_KERNELS
from ._sgd import SGD
from ._single_column import SingleColumnModel
from ._spec import ModelSpec, TrainConfig, MULTI_COLUMN, SINGLE_COLUMN, \
    FAMILIES, DEFAULT_WIDTHS
from ._train import TrainResult, TrainSample, EpochCallback, batches, \
    density_loss, evaluate_loss, train
