import numpy as np
import pytest

from perceptual_patches.autodiff import Tensor
from perceptual_patches.models import SGD


def test_momentum_update():
    """Test two heavy-ball steps by hand."""
    p = Tensor(np.array([1.0]), requires_grad=True)
    opt = SGD({"p": p}, learning_rate=0.1, momentum=0.5)
    p.grad = np.array([2.0])
    assert opt.step() == pytest.approx(2.0)
    np.testing.assert_allclose(p.data, [0.8])
    assert p.grad is None
    p.grad = np.array([2.0])
    opt.step()
    np.testing.assert_allclose(p.data, [0.5])


def test_parameters_without_gradient_coast():
    """Test that a missing gradient keeps the velocity going."""
    p = Tensor(np.array([0.0]), requires_grad=True)
    opt = SGD({"p": p}, learning_rate=1.0, momentum=0.5)
    p.grad = np.array([1.0])
    opt.step()
    opt.step()
    np.testing.assert_allclose(p.data, [-1.5])


def test_gradient_clipping():
    """Test that the global norm is clipped and reported unclipped."""
    a = Tensor(np.array([0.0]), requires_grad=True)
    b = Tensor(np.array([0.0]), requires_grad=True)
    opt = SGD({"a": a, "b": b}, 1.0, momentum=0.0, grad_clip=1.0)
    a.grad = np.array([3.0])
    b.grad = np.array([4.0])
    assert opt.grad_norm() == pytest.approx(5.0)
    assert opt.step() == pytest.approx(5.0)
    np.testing.assert_allclose(a.data, [-0.6])
    np.testing.assert_allclose(b.data, [-0.8])


def test_zero_grad():
    """Test that accumulated gradients can be dropped."""
    p = Tensor(np.array([1.0]), requires_grad=True)
    opt = SGD({"p": p}, 0.1)
    p.grad = np.array([1.0])
    opt.zero_grad()
    assert p.grad is None
    assert opt.grad_norm() == 0.0
