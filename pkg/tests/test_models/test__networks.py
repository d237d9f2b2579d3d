import numpy as np
import pytest

from perceptual_patches import autodiff as ad
from perceptual_patches.models import FAMILIES, MULTI_COLUMN, \
    SINGLE_COLUMN, UnknownLayerError, build_model, ModelSpec

from conftest import positive_model, tiny_model, TINY_WIDTHS


def _image(h=16, w=24, seed=0):
    return np.random.default_rng(seed).uniform(0.1, 1.0, (3, h, w))


@pytest.mark.parametrize("family", FAMILIES)
def test_output_shape_and_sign(family: str):
    """Test that the map has the output resolution and no negative
    entries.
    """
    model = tiny_model(family)
    s = model.output_stride
    pred = model.forward(_image())
    assert pred.shape == (1, 1, 16 // s, 24 // s)
    assert (pred.data >= 0).all()
    assert model.count(_image()) == pytest.approx(float(pred.data.sum()))


@pytest.mark.parametrize("family", FAMILIES)
def test_activations_are_named_in_order(family: str):
    """Test that every named layer shows up and the map comes last."""
    model = tiny_model(family)
    acts = model.activations(_image())
    assert tuple(acts) == model.layer_names
    assert list(acts)[-1] == "density"
    assert model.spec.default_attention_layer in acts


@pytest.mark.parametrize("family", FAMILIES)
def test_forward_from_resumes(family: str):
    """Test that resuming from any resumable activation reproduces the
    map.
    """
    model = positive_model(family)
    acts = model.activations(_image())
    for layer in model.resumable_layers:
        np.testing.assert_allclose(
            model.forward_from(layer, acts[layer]).data,
            acts["density"].data, rtol=1e-12
        )


def test_forward_from_unknown_layer_raises():
    """Test that only resumable layers are accepted."""
    model = tiny_model(MULTI_COLUMN)
    acts = model.activations(_image())
    with pytest.raises(UnknownLayerError):
        model.forward_from("branch1.stage1", acts["branch1.stage1"])


def test_single_column_resumes_from_every_layer():
    """Test that every activation of the single-column family can be
    resumed from, pooled ones included.
    """
    model = tiny_model(SINGLE_COLUMN)
    assert model.resumable_layers == model.layer_names
    assert "front1.pool" in model.layer_names
    assert "front4.pool" not in model.layer_names


@pytest.mark.parametrize("family", FAMILIES)
def test_zero_head_predicts_nothing(family: str):
    """Test that a zero head makes the model count zero."""
    spec = ModelSpec(family, widths=TINY_WIDTHS[family])
    model = build_model(spec, zero_head=True)
    assert model.count(_image()) == 0.0


def test_invalid_images_raise():
    """Test that the channel count and the stride are enforced."""
    model = tiny_model(SINGLE_COLUMN)
    with pytest.raises(ad.ShapeMismatchError, match=".*\\[N, 3, H, W\\].*"):
        model.forward(np.zeros((1, 16, 16)))
    with pytest.raises(ad.ShapeMismatchError, match=".*output stride 8.*"):
        model.forward(np.zeros((3, 12, 16)))


def test_initialization_is_seeded():
    """Test that the seed alone determines the weights."""
    a = tiny_model(MULTI_COLUMN, seed=3).state_dict()
    b = tiny_model(MULTI_COLUMN, seed=3).state_dict()
    c = tiny_model(MULTI_COLUMN, seed=4).state_dict()
    assert all(np.array_equal(a[k], b[k]) for k in a)
    assert not all(np.array_equal(a[k], c[k]) for k in a)
    assert all(not v.any() for k, v in a.items() if k.endswith(".bias"))


def test_models_start_frozen():
    """Test that parameters only record gradients on request."""
    model = tiny_model()
    assert not any(p.requires_grad for p in model)
    model.set_requires_grad(True)
    assert all(p.requires_grad for p in model)


def test_copy_is_independent():
    """Test that a copy shares no parameter storage."""
    model = tiny_model()
    clone = model.copy()
    name = next(iter(model.parameters()))
    clone.parameters()[name].data += 1.0
    assert not np.array_equal(
        model.state_dict()[name], clone.state_dict()[name]
    )
    assert clone.num_parameters() == model.num_parameters()


def test_load_state_dict_errors():
    """Test that the state must match names and shapes."""
    model = tiny_model()
    state = model.state_dict()
    name = next(iter(state))
    missing = dict(state)
    del missing[name]
    with pytest.raises(KeyError, match=".*do not match.*"):
        model.load_state_dict(missing)
    wrong = dict(state)
    wrong[name] = np.zeros((1,))
    with pytest.raises(ValueError, match=".*expected.*"):
        model.load_state_dict(wrong)


@pytest.mark.parametrize("family", FAMILIES)
def test_input_gradient(family: str):
    """Test the gradient of the count with respect to the image."""
    model = positive_model(family)
    image = ad.Tensor(_image()[None], requires_grad=True)
    result = ad.check_gradient(
        lambda: ad.reduce_sum(model.forward(image)), [image],
        max_per_input=20
    )
    assert result.max_rel_error < 1e-4
