import numpy as np
import pytest

from perceptual_patches import autodiff as ad
from perceptual_patches.attack import AttackConfig, DECREASE, \
    INCREASE, PatchPlacementError, align_ground_truth, initial_texture, \
    neutral_texture, pap_generate, start_texture
from perceptual_patches.density import DensityMap
from perceptual_patches.models import MULTI_COLUMN, SINGLE_COLUMN, \
    UnknownLayerError

from conftest import attack_scenes, positive_model, tiny_model


FAST = AttackConfig(
    alpha=0.05, steps=3, epochs=1, patch_size=8, step_rule="sign"
)


@pytest.mark.parametrize("family", (MULTI_COLUMN, SINGLE_COLUMN))
def test_increase_attack_brightens_patch(family: str):
    """Test that ascending on a model monotone in the image intensity
    only ever raises the texture.
    """
    model = positive_model(family)
    patch = pap_generate(model, attack_scenes(2), FAST)
    init = initial_texture(3, 8, FAST.seed)
    assert np.all(patch.delta >= init)
    assert patch.delta.mean() > init.mean()


def test_decrease_attack_darkens_patch():
    """Test that descending lowers the texture."""
    model = positive_model()
    cfg = FAST.replace(direction=DECREASE)
    scenes = attack_scenes(2)
    patch = pap_generate(model, scenes, cfg)
    init = neutral_texture(scenes, 8)
    assert np.all(patch.delta <= init)
    assert patch.delta.mean() < init.mean()


def test_step_records():
    """Test that every inner step is reported once with its losses."""
    records = list()
    cfg = FAST.replace(epochs=2, lam=0.0)
    pap_generate(positive_model(), attack_scenes(3), cfg, records.append)
    assert len(records) == 2 * 3 * 3
    assert {(r.epoch, r.scene, r.step) for r in records} == {
        (e, s, t) for e in range(2) for s in range(3) for t in range(3)
    }
    for r in records:
        assert r.position_loss == 0.0
        assert r.total_loss == pytest.approx(r.scale_loss)
        assert r.attention_mass >= 0.0


def test_position_term_enters_total():
    """Test that the weighted position loss is added to the total."""
    records = list()
    cfg = FAST.replace(lam=0.5)
    pap_generate(positive_model(), attack_scenes(1), cfg, records.append)
    r = records[0]
    assert r.position_loss > 0.0
    assert r.total_loss == pytest.approx(r.scale_loss + 0.5 * r.position_loss)


def test_generation_is_deterministic_and_leaves_model():
    """Test that equal configs give equal patches and the source model
    is not changed.
    """
    model = tiny_model(MULTI_COLUMN)
    before = model.state_dict()
    scenes = attack_scenes(2)
    cfg = FAST.replace(step_rule="raw", rotate=True, shape="circle")
    a = pap_generate(model, scenes, cfg)
    b = pap_generate(model, scenes, cfg)
    np.testing.assert_array_equal(a.delta, b.delta)
    assert a.shape == "circle"
    for name, values in model.state_dict().items():
        np.testing.assert_array_equal(before[name], values)
    assert not any(p.requires_grad for p in model)


def test_init_texture_is_used():
    """Test that a given start texture replaces the random one."""
    cfg = FAST.replace(direction=DECREASE)
    patch = pap_generate(
        positive_model(), attack_scenes(1), cfg,
        init=np.zeros((3, 8, 8))
    )
    assert not patch.delta.any()


def test_generation_errors():
    """Test the argument checks of the generator."""
    model = tiny_model(MULTI_COLUMN)
    with pytest.raises(ValueError, match=".*at least one scene.*"):
        pap_generate(model, [], FAST)
    with pytest.raises(UnknownLayerError):
        pap_generate(
            model, attack_scenes(1),
            FAST.replace(attention_layer="branch1.stage1")
        )
    with pytest.raises(PatchPlacementError):
        pap_generate(model, attack_scenes(1), FAST.replace(patch_size=40))


def test_align_ground_truth():
    """Test pooling of image-resolution ground truth."""
    gt = DensityMap(np.ones((8, 12), dtype=np.float32), 1)
    assert align_ground_truth(gt, (8, 12)) is gt.values
    pooled = align_ground_truth(gt, (2, 3))
    np.testing.assert_array_equal(pooled, np.full((2, 3), 16.0))
    with pytest.raises(ad.ShapeMismatchError, match=".*cannot be pooled.*"):
        align_ground_truth(gt, (4, 4))


def test_initial_texture_is_seeded():
    """Test that the start texture depends on the seed only."""
    a = initial_texture(3, 5, 1)
    assert a.shape == (3, 5, 5)
    assert a.dtype == np.float32
    np.testing.assert_array_equal(a, initial_texture(3, 5, 1))
    assert not np.array_equal(a, initial_texture(3, 5, 2))


def test_neutral_texture_is_flat_median():
    """Test that the neutral texture fills every channel with the median
    of that channel over all scenes.
    """
    scenes = attack_scenes(3)
    tex = neutral_texture(scenes, 4)
    assert tex.shape == (3, 4, 4)
    assert tex.dtype == np.float32
    pixels = np.concatenate([img.reshape(3, -1) for img, _ in scenes], 1)
    for ch in range(3):
        np.testing.assert_allclose(tex[ch], np.median(pixels[ch]))
    with pytest.raises(ValueError, match=".*at least one scene.*"):
        neutral_texture([], 4)


def test_start_texture_depends_on_direction():
    """Test that increase attacks start from noise and decrease attacks
    from the neutral fill.
    """
    scenes = attack_scenes(2)
    np.testing.assert_array_equal(
        start_texture(scenes, 6, 3, INCREASE), initial_texture(3, 6, 3)
    )
    np.testing.assert_array_equal(
        start_texture(scenes, 6, 3, DECREASE), neutral_texture(scenes, 6)
    )
    cfg = FAST.replace(direction=DECREASE, lam=0.0)
    records = list()
    pap_generate(positive_model(), scenes, cfg, records.append)
    assert len(records) == 2 * 3
