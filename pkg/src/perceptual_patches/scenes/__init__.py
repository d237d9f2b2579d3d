"""This package generates the synthetic crowd scenes the toy models are
trained and attacked on, and reads and writes them as datasets.
"""

__all__ = [
    "SceneConfig", "MAX_STRIDE", "PRESETS", "preset",
    "Blob", "background", "render_scene", "gen_scene",
    "DatasetScene", "gen_dataset", "read_manifest", "load_dataset",
    "as_samples", "MANIFEST", "ANNOTATIONS", "TRAIN", "TEST", "SPLITS",
    "OvercrowdedSceneError"
]

from ._config import SceneConfig, MAX_STRIDE, PRESETS, preset
from ._dataset import DatasetScene, gen_dataset, read_manifest, \
    load_dataset, as_samples, MANIFEST, ANNOTATIONS, TRAIN, TEST, SPLITS
from ._exceptions import OvercrowdedSceneError
from ._render import Blob, background, render_scene, gen_scene
