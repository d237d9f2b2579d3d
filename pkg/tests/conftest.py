import hypothesis.extra.numpy as _hnp
import hypothesis.strategies as _strategies
import hypothesis_fspaths as _hypothesis_fspaths
import logging as _logging
import numpy as _np
import os.path as _ospath
import sqlalchemy as _sqlalchemy

from dataclasses import dataclass as _dataclass
from hypothesis.strategies import composite as _composite, \
    DrawFn as _DrawFn, SearchStrategy as _SearchStrategy
from pytest import fixture as _fixture, TempPathFactory as _TempPathFactory
from tempfile import TemporaryDirectory as _TemporaryDirectory
from typing import Dict as _Dict, List as _List, Sequence as _Sequence, \
    Tuple as _Tuple

from perceptual_patches import tools as _tools
from perceptual_patches.density import PointSet as _PointSet, \
    DensityMap as _DensityMap, gen_density_map as _gen_density_map, \
    downsample_preserving_sum as _downsample
from perceptual_patches.evaluation import SceneCounts as _SceneCounts
from perceptual_patches.models import DensityModel as _DensityModel, \
    ModelSpec as _ModelSpec, MULTI_COLUMN as _MULTI_COLUMN, \
    SINGLE_COLUMN as _SINGLE_COLUMN, TrainConfig as _TrainConfig, \
    build_model as _build_model, train as _train
from perceptual_patches.registry import EngineBase as _EngineBase
from perceptual_patches.scenes import SceneConfig as _SceneConfig, \
    PRESETS as _PRESETS, TEST as _TEST, TRAIN as _TRAIN, \
    as_samples as _as_samples, gen_dataset as _gen_dataset, \
    gen_scene as _gen_scene, load_dataset as _load_dataset


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


def str_paths() -> _SearchStrategy[str]:
    """A hypothesis strategy for generating `str` paths."""
    return _hypothesis_fspaths.fspaths(False).filter(
        lambda p: isinstance(p, str)
    )


def rel_str_paths() -> _SearchStrategy[str]:
    """A hypothesis strategy to generate relative str paths of nonzero
    length.
    """
    return str_paths().filter(
        lambda p: (not _ospath.isabs(p)) and len(p) > 0
    )


def unit_arrays(shape: _Tuple[int, ...]) -> _SearchStrategy[_np.ndarray]:
    """A hypothesis strategy for float64 arrays with values in [0, 1]."""
    return _hnp.arrays(
        _np.float64, shape,
        elements=_strategies.floats(0.0, 1.0, allow_nan=False)
    )


@_composite
def point_sets(draw: _DrawFn, max_points: int = 12) -> _PointSet:
    """A hypothesis strategy generating `PointSet`s inside small
    images.
    """
    w = draw(_strategies.integers(4, 40))
    h = draw(_strategies.integers(4, 40))
    n = draw(_strategies.integers(0, max_points))
    xs = draw(_strategies.lists(
        _strategies.floats(0.0, w, exclude_max=True), min_size=n, max_size=n
    ))
    ys = draw(_strategies.lists(
        _strategies.floats(0.0, h, exclude_max=True), min_size=n, max_size=n
    ))
    return _PointSet(_np.array(list(zip(xs, ys))).reshape(-1, 2), w, h)

# Prevent pytest from collecting the strategy
point_sets.__test__ = False  # type: ignore [attr-defined] # noqa: E305


@_composite
def scene_counts(draw: _DrawFn) -> _List[_SceneCounts]:
    """A hypothesis strategy generating non-empty lists of
    `SceneCounts`.
    """
    counts = _strategies.floats(0.0, 1e4, allow_nan=False)
    n = draw(_strategies.integers(1, 20))
    return [
        _SceneCounts(i, draw(counts), draw(counts), draw(counts))
        for i in range(n)
    ]

# Prevent pytest from collecting the strategy
scene_counts.__test__ = False  # type: ignore [attr-defined] # noqa: E305


TINY_WIDTHS = {
    _MULTI_COLUMN: (2, 2, 2),
    _SINGLE_COLUMN: (2, 2, 2, 2, 2, 2, 2),
}
"""Channel widths that keep the test models fast."""

TINY_SCENES = _SceneConfig(
    height=32,
    width=32,
    min_heads=1,
    max_heads=4,
    min_radius=1.5,
    max_radius=2.5,
    train_size=4,
    test_size=2,
    sigma_const=2.0
)
"""Small scenes for tests that render data."""


def tiny_model(
    family: str = _MULTI_COLUMN, seed: int = 0, dtype=_np.float32
) -> _DensityModel:
    """Build an untrained model of the given family with tiny widths."""
    spec = _ModelSpec(family, widths=TINY_WIDTHS[family], seed=seed)
    return _build_model(spec, dtype=dtype)


def positive_model(
    family: str = _MULTI_COLUMN, seed: int = 0, dtype=_np.float64
) -> _DensityModel:
    """Build a tiny model whose kernels are all non-negative. Its
    predicted count grows monotonically with the image intensities,
    which makes the direction of an attack predictable.
    """
    model = tiny_model(family, seed, dtype)
    model.load_state_dict({
        k: _np.abs(v) for k, v in model.state_dict().items()
    })
    return model


def attack_scenes(
    n: int, seed: int = 0, cfg: _SceneConfig = TINY_SCENES
) -> _List[_Tuple[_np.ndarray, _DensityMap]]:
    """Render scenes with image-resolution ground truth."""
    out = list()
    for i in range(n):
        image, points = _gen_scene(cfg, _tools.derive_rng(seed, i))
        out.append(
            (image, _gen_density_map(points, sigma_const=cfg.sigma_const))
        )
    return out


def constant_scenes(
    n: int, hw: _Tuple[int, int] = (16, 16), value: float = 0.5
) -> _List[_Tuple[_np.ndarray, _DensityMap]]:
    """Uniform gray scenes with an all-zero ground truth."""
    h, w = hw
    return [
        (
            _np.full((3, h, w), value, dtype=_np.float32),
            _DensityMap(_np.zeros((h, w), dtype=_np.float32), 1)
        )
        for _ in range(n)
    ]


def counts_of(
    model: _DensityModel, images: _Sequence[_np.ndarray]
) -> _List[float]:
    """The predicted counts of several images."""
    return [model.count(img) for img in images]


class InMemoryEngine(_EngineBase):
    """An in-memory version of the registry engine used for testing."""

    def __init__(self) -> None:
        """Initialize a new in-memory engine object."""
        engine = _sqlalchemy.create_engine("sqlite://")
        super().__init__(engine)

    def get_underlying_engine(self) -> _sqlalchemy.Engine:
        """Obtain the underlying engine. This function should only be
        called by test functions.

        Returns:
            sqlalchemy.Engine: The underlying sqlalchemy engine.
        """
        return self._engine


@_fixture(scope="function")
def memory_engine():
    """A fixture providing an in-memory registry with its tables."""
    engine = InMemoryEngine()
    engine.setup_tables()
    yield engine
    engine.dispose()


@_fixture(scope="session")
def tiny_dataset(tmp_path_factory: _TempPathFactory) -> str:
    """A fixture rendering a small dataset once per test session."""
    out = str(tmp_path_factory.mktemp("dataset"))
    _gen_dataset(TINY_SCENES, 0, out)
    _logger.debug("Rendered the test dataset to %s.", out)
    return out


@_fixture
def nested_tempdir():
    """A fixture generating a temporary directory protected inside
    another temporary directory.
    """
    with _TemporaryDirectory() as outer:
        with _TemporaryDirectory(dir=outer) as inner:
            yield inner


AttackScenes = _List[_Tuple[_np.ndarray, _DensityMap]]


@_dataclass(frozen=True)
class StandardBench:
    """The standard preset with one trained model per family."""

    train: AttackScenes
    """The training scenes with image-resolution ground truth."""

    test: AttackScenes
    models: _Dict[str, _DensityModel]
    """The trained models by family. Tests must not modify them."""

    def samples(self, family: str) -> AttackScenes:
        """The training scenes pooled to a model's output stride."""
        stride = self.models[family].output_stride
        return [(img, _downsample(gt, stride)) for img, gt in self.train]


@_fixture(scope="session")
def standard_bench(tmp_path_factory: _TempPathFactory) -> StandardBench:
    """A fixture rendering the standard preset and training a model of
    each family with the default settings, once per test session.
    """
    out = str(tmp_path_factory.mktemp("standard"))
    _gen_dataset(_PRESETS["standard"], 0, out)
    train = _load_dataset(out, _TRAIN)
    test = _load_dataset(out, _TEST)
    models = dict()
    for family in (_MULTI_COLUMN, _SINGLE_COLUMN):
        model = _build_model(_ModelSpec(family))
        _train(
            model, _as_samples(train, model.output_stride), _TrainConfig()
        )
        _logger.info("Trained the %s bench model.", family)
        models[family] = model
    return StandardBench(
        [(s.image, s.density) for s in train],
        [(s.image, s.density) for s in test],
        models
    )
