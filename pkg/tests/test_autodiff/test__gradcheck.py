import numpy as np
import pytest

from perceptual_patches import autodiff as ad
from perceptual_patches.autodiff import Tensor, check_gradient, \
    relative_error


TOLERANCE = 1e-4


def _leaf(shape, seed=0, low=None, high=None):
    rng = np.random.default_rng(seed)
    if low is None:
        data = rng.normal(size=shape)
    else:
        data = rng.uniform(low, high, size=shape)
    return Tensor(data, requires_grad=True)


def _weighted(out: Tensor, seed: int = 99) -> Tensor:
    """Reduce an output with random weights so that no gradient entry
    vanishes by symmetry.
    """
    w = np.random.default_rng(seed).normal(size=out.shape)
    return ad.reduce_sum(ad.mul(out, Tensor(w)))


@pytest.mark.parametrize("dilation", (1, 2))
def test_conv2d_gradients(dilation: int):
    """Test the convolution gradients of input, kernel and bias."""
    x = _leaf((1, 2, 5, 6), 0)
    w = _leaf((3, 2, 3, 3), 1)
    b = _leaf((3,), 2)
    result = check_gradient(
        lambda: _weighted(ad.conv2d(x, w, b, dilation)), [x, w, b]
    )
    assert result.max_rel_error < TOLERANCE


def test_activation_gradients():
    """Test the relu and sigmoid gradients away from the relu kink."""
    x = _leaf((2, 7), 3)
    result = check_gradient(
        lambda: _weighted(ad.add(ad.relu(x), ad.sigmoid(x))), [x]
    )
    assert result.max_rel_error < TOLERANCE


def test_maxpool_and_upsample_gradients():
    """Test the pooling and resizing gradients."""
    x = _leaf((1, 2, 4, 6), 4)
    result = check_gradient(
        lambda: _weighted(ad.upsample_bilinear(ad.maxpool2(x), 7, 9)), [x]
    )
    assert result.max_rel_error < TOLERANCE


@pytest.mark.parametrize("rotation", (0, 1, 3))
def test_place_patch_and_clip_gradients(rotation: int):
    """Test the gradient of a clipped composition of image and rotated
    texture.
    """
    delta = _leaf((3, 4, 4), 5, -0.5, 1.0)
    image = Tensor(np.random.default_rng(6).uniform(0, 1, (1, 3, 8, 9)))
    result = check_gradient(
        lambda: _weighted(ad.clip(ad.add(
            image, ad.place_patch(delta, 2, 3, 8, 9, rotation)
        ))),
        [delta]
    )
    assert result.max_rel_error < TOLERANCE


def test_masked_sum_and_concat_gradients():
    """Test the gradients of channel concatenation and a masked sum."""
    a = _leaf((1, 1, 4, 4), 7)
    b = _leaf((1, 2, 4, 4), 8)
    mask = np.zeros((4, 4), dtype=bool)
    mask[1:3, :] = True
    result = check_gradient(
        lambda: ad.reduce_sum(
            ad.mul(ad.concat_channels([a, b]), ad.concat_channels([b, a])),
            mask
        ),
        [a, b]
    )
    assert result.max_rel_error < TOLERANCE


def test_wrong_gradient_is_detected():
    """Test that a gradient missing one path is reported with its
    location.
    """
    x = _leaf((5,), 9)
    result = check_gradient(
        lambda: ad.reduce_sum(ad.mul(x, x.detach())), [x]
    )
    assert result.max_rel_error == pytest.approx(0.5, rel=1e-4)
    assert result.input_index == 0


def test_subsampled_probing_restores_state():
    """Test that probing a subset keeps the data and the stored
    gradient of the inputs.
    """
    x = _leaf((4, 4), 10)
    before = x.data.copy()
    x.grad = np.full((4, 4), 3.0)
    result = check_gradient(
        lambda: _weighted(ad.sigmoid(x)), [x], max_per_input=5
    )
    assert result.max_rel_error < TOLERANCE
    np.testing.assert_array_equal(x.data, before)
    np.testing.assert_array_equal(x.grad, np.full((4, 4), 3.0))


def test_invalid_inputs_raise():
    """Test that there must be inputs and they must require gradients."""
    with pytest.raises(ValueError, match=".*No inputs.*"):
        check_gradient(lambda: Tensor(0.0), [])
    x = Tensor(np.zeros(2))
    with pytest.raises(ValueError, match=".*require a gradient.*"):
        check_gradient(lambda: ad.reduce_sum(x), [x])


@pytest.mark.parametrize("a,b,expected", (
    (1.0, 1.0, 0.0),
    (2.0, 1.0, 0.5),
    (0.0, 0.0, 0.0),
    (1e-9, 0.0, 0.1),
))
def test_relative_error(a: float, b: float, expected: float):
    """Test the relative error including its floor."""
    assert relative_error(a, b) == pytest.approx(expected)
