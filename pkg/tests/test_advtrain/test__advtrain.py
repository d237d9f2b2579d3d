import numpy as np
import pytest

from datetime import timedelta

from perceptual_patches import autodiff as ad
from perceptual_patches.advtrain import AdvTrainConfig, IAT, OAT, \
    adversarial_train, iat_loss, iat_train, make_adversarial_set, \
    oat_train
from perceptual_patches.attack import AttackConfig, Patch
from perceptual_patches.density import DensityMap
from perceptual_patches.models import TrainConfig, density_loss

from conftest import constant_scenes, positive_model


SLOW_TRAIN = TrainConfig(learning_rate=1e-5, grad_clip=1.0)
"""Tiny steps keep the positive test model positive."""


def _samples(n: int):
    return [
        (img, DensityMap(np.zeros((4, 4)), 4))
        for img, _ in constant_scenes(n, (16, 16), 0.5)
    ]


def _white_patch(model, scenes, cfg):
    return Patch(np.ones((3, 4, 4)), "square")


@pytest.fixture
def provider(mocker):
    """A patch provider returning a white 4px patch."""
    return mocker.Mock(side_effect=_white_patch)


def test_adversarial_set_patches_every_scene(provider):
    """Test that every scene gets its own patch with its own seed and
    keeps its ground truth.
    """
    model = positive_model()
    scenes = _samples(3)
    adv = make_adversarial_set(model, scenes, AttackConfig(), 7, 1, provider)
    assert len(adv) == 3
    seeds = [c.args[2].seed for c in provider.call_args_list]
    assert len(set(seeds)) == 3
    for (clean_img, gt), (adv_img, adv_gt) in zip(scenes, adv):
        assert adv_gt is gt
        changed = np.any(adv_img != clean_img, axis=0)
        assert changed.sum() == 16
        assert np.all(adv_img[:, changed] == 1.0)


def test_adversarial_set_ignores_worker_count(provider):
    """Test that threads do not change the patched scenes."""
    model = positive_model()
    scenes = _samples(4)
    one = make_adversarial_set(model, scenes, AttackConfig(), 1, 1, provider)
    many = make_adversarial_set(
        model, scenes, AttackConfig(), 1, 3, provider
    )
    for (a, _), (b, _) in zip(one, many):
        np.testing.assert_array_equal(a, b)


def test_iat_loss_mixes_terms():
    """Test lam * L_clean + (1 - lam) * L_adv and the clean-only case."""
    model = positive_model()
    clean = _samples(1)
    adv = [(np.ones((3, 16, 16)), clean[0][1])]
    l_clean = density_loss(
        [model.forward(clean[0][0])], [clean[0][1].values]
    ).item()
    l_adv = density_loss([model.forward(adv[0][0])], [adv[0][1].values])
    mixed = iat_loss(model, clean, adv, 0.25).item()
    assert mixed == pytest.approx(0.25 * l_clean + 0.75 * l_adv.item())
    assert iat_loss(model, clean, adv, 1.0).item() == pytest.approx(l_clean)


def test_oat_attacks_pretrained_model_once(provider):
    """Test that OAT patches every scene once against the pretrained
    model and trains a copy for E epochs.
    """
    model = positive_model()
    before = model.state_dict()
    cfg = AdvTrainConfig(variant=OAT, epochs=4, train=SLOW_TRAIN)
    seen = list()
    result = oat_train(
        model, _samples(2), cfg, provider,
        on_epoch=lambda epoch, loss: seen.append(epoch)
    )
    assert provider.call_count == 2
    assert all(c.args[0] is model for c in provider.call_args_list)
    assert result.model is not model
    assert result.variant == OAT
    assert len(result.losses) == 4
    assert seen == [0, 1, 2, 3]
    assert not result.stopped_early
    for name, values in model.state_dict().items():
        np.testing.assert_array_equal(before[name], values)


def test_iat_regenerates_after_warmup(provider):
    """Test that IAT only creates patches once the clean weight drops
    below one, and always against the model being trained.
    """
    model = positive_model()
    cfg = AdvTrainConfig(variant=IAT, epochs=4, train=SLOW_TRAIN)
    result = iat_train(model, _samples(2), cfg, provider)
    # lambda is 1 in epochs 0 and 1; batches hold a single scene
    assert provider.call_count == 2 * 2
    assert all(c.args[0] is not model for c in provider.call_args_list)
    assert result.variant == IAT
    assert len(result.losses) == 4



def test_iat_weights_terms_by_schedule_only(provider):
    """Test that the clean mix count does not change IAT and that no
    adversarial part turns patch generation off.
    """
    base = AdvTrainConfig(variant=IAT, epochs=4, train=SLOW_TRAIN)
    one = iat_train(positive_model(), _samples(2), base, provider)
    calls = provider.call_count
    three = iat_train(
        positive_model(), _samples(2), base.replace(mix_clean=3), provider
    )
    assert provider.call_count == 2 * calls
    np.testing.assert_allclose(three.losses, one.losses)
    provider.reset_mock()
    clean_only = iat_train(
        positive_model(), _samples(2),
        base.replace(mix_adv=0, mix_clean=1), provider
    )
    assert provider.call_count == 0
    assert len(clean_only.losses) == 4

@pytest.mark.parametrize("variant", (OAT, IAT))
def test_time_budget_stops_early(provider, variant: str):
    """Test that an exhausted budget ends training after one epoch."""
    cfg = AdvTrainConfig(
        variant=variant, epochs=4, train=SLOW_TRAIN,
        time_budget=timedelta(0)
    )
    result = adversarial_train(positive_model(), _samples(1), cfg, provider)
    assert result.variant == variant
    assert len(result.losses) == 1
    assert result.stopped_early
    assert result.wall_clock >= timedelta(0)


def test_oat_with_generated_patches():
    """Test OAT end to end with the perceptual patch generator."""
    attack = AttackConfig(steps=1, epochs=1, patch_size=4)
    cfg = AdvTrainConfig(epochs=4, train=SLOW_TRAIN, attack=attack)
    result = adversarial_train(positive_model(), _samples(2), cfg)
    assert len(result.losses) == 4
    assert all(np.isfinite(result.losses))


@pytest.mark.parametrize("fn", (oat_train, iat_train))
def test_empty_scenes_raise(fn):
    """Test that there must be scenes to train on."""
    with pytest.raises(ValueError, match=".*empty.*"):
        fn(positive_model(), [], AdvTrainConfig())


def test_iat_loss_needs_matching_maps():
    """Test that a ground truth at the wrong resolution is rejected."""
    model = positive_model()
    bad = [(np.zeros((3, 16, 16)), DensityMap(np.zeros((16, 16)), 1))]
    with pytest.raises(ad.ShapeMismatchError):
        iat_loss(model, bad, [], 0.5)
