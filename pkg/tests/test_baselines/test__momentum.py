import numpy as np
import pytest

from hypothesis import given

from perceptual_patches.baselines import MomentumState, migm_step, \
    nigm_step

from conftest import unit_arrays


@given(grad=unit_arrays((2, 3)))
def test_accumulate_normalizes_by_l1(grad: np.ndarray):
    """Test that every non-zero gradient enters with unit L1 mass."""
    state = MomentumState.zeros((2, 3), mu=0.5)
    state.accumulate(grad)
    if np.abs(grad).sum() > 0:
        assert np.abs(state.g).sum() == pytest.approx(1.0)
    else:
        assert not state.g.any()


def test_accumulate_decays():
    """Test g <- mu * g + grad / ||grad||_1 over two steps."""
    state = MomentumState(np.array([2.0, 0.0]), mu=0.5)
    state.accumulate(np.array([0.0, -4.0]))
    np.testing.assert_allclose(state.g, [1.0, -1.0])
    state.accumulate(np.zeros(2))
    np.testing.assert_allclose(state.g, [0.5, -0.5])


def test_momentum_errors():
    """Test the checks of the momentum state."""
    with pytest.raises(ValueError, match=".*decay must be >= 0.*"):
        MomentumState.zeros(3, mu=-1.0)
    with pytest.raises(ValueError, match=".*does not match.*"):
        MomentumState.zeros(3).accumulate(np.zeros(4))


def test_migm_step_takes_sign_and_clips():
    """Test that the update moves by alpha times the momentum sign and
    stays in [0, 1].
    """
    delta = np.array([0.5, 0.5, 0.99], dtype=np.float32)
    state = MomentumState.zeros(3)
    out = migm_step(delta, np.array([1.0, -3.0, 2.0]), state, 0.1)
    np.testing.assert_allclose(out, [0.6, 0.4, 1.0], rtol=1e-6)
    assert out.dtype == np.float32
    out = migm_step(delta, np.array([1.0, -3.0, 2.0]), state, 0.1, -1.0)
    np.testing.assert_allclose(out, [0.4, 0.6, 0.89], rtol=1e-6)


def test_migm_step_applies_transform(mocker):
    """Test that the transform sees the raw gradient before it enters
    the momentum.
    """
    transform = mocker.Mock(side_effect=lambda g: -g)
    state = MomentumState.zeros(2)
    grad = np.array([1.0, 1.0])
    out = migm_step(np.full(2, 0.5), grad, state, 0.1, transform=transform)
    transform.assert_called_once_with(grad)
    np.testing.assert_allclose(out, [0.4, 0.4])


def test_nigm_step_evaluates_at_lookahead(mocker):
    """Test that the gradient is taken at delta + alpha * mu * g."""
    state = MomentumState(np.array([1.0, -1.0]), mu=0.5)
    grad_fn = mocker.Mock(return_value=np.array([1.0, 1.0]))
    delta = np.array([0.5, 0.5])
    out = nigm_step(delta, state, 0.2, grad_fn)
    (lookahead,), _ = grad_fn.call_args
    np.testing.assert_allclose(lookahead, [0.6, 0.4])
    # g = 0.5 * [1, -1] + [0.5, 0.5]
    np.testing.assert_allclose(state.g, [1.0, 0.0])
    np.testing.assert_allclose(out, [0.7, 0.5])
