import numpy as np
import pytest

from perceptual_patches import autodiff as ad
from perceptual_patches.baselines import avg_dens_loss, count_loss, \
    map_error_loss
from perceptual_patches.models import SINGLE_COLUMN

from conftest import positive_model


def _image():
    return np.random.default_rng(0).uniform(0, 1, (3, 16, 16))


def test_count_and_average():
    """Test that the ensemble loss is the mean count."""
    a = positive_model(seed=1)
    b = positive_model(seed=2)
    image = _image()
    assert count_loss(a, image).item() == pytest.approx(a.count(image))
    mean = (a.count(image) + b.count(image)) / 2
    assert avg_dens_loss([a, b], image).item() == pytest.approx(mean)
    with pytest.raises(ValueError, match=".*At least one model.*"):
        avg_dens_loss([], image)


def test_map_error():
    """Test the squared map error against the prediction itself and
    against zero.
    """
    model = positive_model(SINGLE_COLUMN)
    image = _image()
    pred = model.forward(image).data
    assert map_error_loss(model, image, pred[0, 0]).item() == 0.0
    assert map_error_loss(model, image, np.zeros((2, 2))).item() == \
        pytest.approx(float((pred ** 2).sum()))
    with pytest.raises(ad.ShapeMismatchError, match=".*does not match.*"):
        map_error_loss(model, image, np.zeros((4, 4)))
