import numpy as np
import pytest

from perceptual_patches.attack import DECREASE, initial_texture, \
    neutral_texture
from perceptual_patches.baselines import APAM, AVG_DENS, \
    BaselineConfig, METHODS, MIGM, NIGM, RANDOM, TI_NIGM, \
    generate_baseline_patch

from conftest import attack_scenes, positive_model, tiny_model


def _cfg(method: str, **kwargs) -> BaselineConfig:
    return BaselineConfig(
        method, alpha=0.05, steps=2, epochs=1, patch_size=8, **kwargs
    )


@pytest.mark.parametrize("kwargs,msg", (
    ({"method": "fgsm"}, ".*Unknown baseline method.*"),
    ({"method": MIGM, "steps": 0}, ".*must be positive.*"),
    ({"method": MIGM, "direction": "up"}, ".*Unknown direction.*"),
    ({"method": MIGM, "mu": -1.0}, ".*decay must be >= 0.*"),
    ({"method": APAM, "kappa": -1.0}, ".*kappa.*"),
))
def test_invalid_baseline_configs_raise(kwargs, msg: str):
    """Test the range checks of the baseline config."""
    with pytest.raises(ValueError, match=msg):
        BaselineConfig(**kwargs)


def test_baseline_config_json():
    """Test that the JSON form restores the config."""
    cfg = _cfg(TI_NIGM, ti_kernel_size=7, shape="circle")
    obj = cfg.to_json()
    obj["extra"] = True
    assert BaselineConfig.from_json(obj) == cfg
    assert cfg.sign == 1.0


def test_random_baseline_is_start_texture():
    """Test that the random baseline is not optimized."""
    patch = generate_baseline_patch(
        [tiny_model()], attack_scenes(1), _cfg(RANDOM, seed=4)
    )
    np.testing.assert_array_equal(patch.delta, initial_texture(3, 8, 4))


@pytest.mark.parametrize("method", (MIGM, NIGM, TI_NIGM, AVG_DENS))
def test_increase_baselines_brighten_patch(method: str):
    """Test that ascending methods raise the texture of a model that
    is monotone in the image intensity.
    """
    models = [positive_model(seed=1), positive_model(seed=2)]
    patch = generate_baseline_patch(models, attack_scenes(2), _cfg(method))
    init = initial_texture(3, 8, 0)
    assert np.all(patch.delta >= init)
    assert patch.delta.mean() > init.mean()


def test_apam_decrease_fits_zero_map():
    """Test that fitting the zero map darkens the texture."""
    scenes = attack_scenes(2)
    patch = generate_baseline_patch(
        [positive_model()], scenes, _cfg(APAM, direction=DECREASE)
    )
    init = neutral_texture(scenes, 8)
    assert np.all(patch.delta <= init)
    assert patch.delta.mean() < init.mean()


@pytest.mark.parametrize("method", METHODS)
def test_baselines_give_valid_patches(method: str):
    """Test that every method returns a texture in [0, 1]."""
    patch = generate_baseline_patch(
        [tiny_model()], attack_scenes(1), _cfg(method, shape="trapezoid")
    )
    assert patch.delta.shape == (3, 8, 8)
    assert patch.shape == "trapezoid"
    assert 0.0 <= patch.delta.min() and patch.delta.max() <= 1.0


def test_baseline_needs_models_and_scenes():
    """Test that empty inputs are rejected."""
    with pytest.raises(ValueError, match=".*At least one model.*"):
        generate_baseline_patch([], attack_scenes(1), _cfg(MIGM))
    with pytest.raises(ValueError, match=".*At least one model.*"):
        generate_baseline_patch([tiny_model()], [], _cfg(MIGM))
