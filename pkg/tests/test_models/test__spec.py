import pytest

from perceptual_patches.models import DEFAULT_WIDTHS, FAMILIES, \
    ModelSpec, MULTI_COLUMN, SINGLE_COLUMN, TrainConfig


@pytest.mark.parametrize("family", FAMILIES)
def test_default_widths(family: str):
    """Test that an empty width tuple selects the defaults."""
    assert ModelSpec(family).widths == DEFAULT_WIDTHS[family]


@pytest.mark.parametrize("family,stride,layer", (
    (MULTI_COLUMN, 4, "features"),
    (SINGLE_COLUMN, 8, "back3"),
))
def test_family_properties(family: str, stride: int, layer: str):
    """Test the output stride and attention layer of both families."""
    spec = ModelSpec(family)
    assert spec.output_stride == stride
    assert spec.default_attention_layer == layer


@pytest.mark.parametrize("kwargs,msg", (
    ({"family": "transformer"}, ".*Unknown model family.*"),
    ({"family": MULTI_COLUMN, "widths": (2, 2)}, ".*needs 3 widths.*"),
    ({"family": SINGLE_COLUMN, "widths": (2,) * 6}, ".*needs 7 widths.*"),
    ({"family": MULTI_COLUMN, "widths": (2, 0, 2)}, ".*positive.*"),
    ({"family": SINGLE_COLUMN, "dilation": 1}, ".*dilation >= 2.*"),
    ({"family": MULTI_COLUMN, "in_channels": 0}, ".*in_channels.*"),
))
def test_invalid_specs_raise(kwargs, msg: str):
    """Test that inconsistent architectures are rejected."""
    with pytest.raises(ValueError, match=msg):
        ModelSpec(**kwargs)


def test_spec_json_ignores_derived_keys():
    """Test that the stored output stride does not disturb loading."""
    spec = ModelSpec(SINGLE_COLUMN, widths=(3,) * 7, dilation=3, seed=5)
    obj = spec.to_json()
    assert obj["output_stride"] == 8
    assert ModelSpec.from_json(obj) == spec


@pytest.mark.parametrize("kwargs", (
    {"epochs": -1},
    {"learning_rate": -1e-3},
    {"momentum": 1.0},
    {"batch_size": 0},
    {"grad_clip": 0.0},
))
def test_invalid_train_configs_raise(kwargs):
    """Test the range checks of the training config."""
    with pytest.raises(ValueError):
        TrainConfig(**kwargs)


def test_train_config_replace_and_json():
    """Test that replacing keeps the other fields and the JSON form
    restores the config.
    """
    cfg = TrainConfig().replace(epochs=3, grad_clip=None)
    assert cfg.epochs == 3
    assert cfg.learning_rate == TrainConfig().learning_rate
    assert TrainConfig.from_json(cfg.to_json()) == cfg
