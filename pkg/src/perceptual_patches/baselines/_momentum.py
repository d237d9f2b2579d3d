import numpy as _np

from typing import Callable as _Callable, Optional as _Optional


GradientTransform = _Callable[[_np.ndarray], _np.ndarray]
"""Applied to a raw gradient before it enters the momentum, for example
`ti_smooth`.
"""


class MomentumState:
    """The accumulated normalized gradient of the momentum iterative
    methods.
    """

    __slots__ = ("g", "mu")

    def __init__(self, g: _np.ndarray, mu: float = 1.0) -> None:
        """Initialize the state.

        Args:
            g (ndarray): The accumulated gradient, shaped like the
                perturbation.
            mu (float, optional): The decay. Defaults to 1.0.

        Raises:
            ValueError: If `mu` is negative.
        """
        if mu < 0:
            raise ValueError(f"The momentum decay must be >= 0, got {mu}.")
        self.g = _np.array(g, dtype=_np.float64)
        """The accumulated gradient."""
        self.mu = float(mu)
        """The decay."""

    @classmethod
    def zeros(cls, shape, mu: float = 1.0) -> "MomentumState":
        """A fresh state for a perturbation of the given shape."""
        return cls(_np.zeros(shape), mu)

    def accumulate(self, grad: _np.ndarray) -> None:
        """g <- mu * g + grad / ||grad||_1. A zero gradient contributes
        nothing.

        Raises:
            ValueError: If the gradient shape differs from the state.
        """
        grad = _np.asarray(grad, dtype=_np.float64)
        if grad.shape != self.g.shape:
            raise ValueError(
                f"Gradient shape {grad.shape} does not match the state "
                f"shape {self.g.shape}."
            )
        norm = _np.abs(grad).sum()
        self.g = self.mu * self.g
        if norm > 0:
            self.g += grad / norm


def _sign_step(
    delta: _np.ndarray, state: MomentumState, alpha: float, sign: float
) -> _np.ndarray:
    out = delta + sign * alpha * _np.sign(state.g)
    return _np.clip(out, 0.0, 1.0).astype(delta.dtype, copy=False)


def migm_step(
    delta: _np.ndarray,
    grad: _np.ndarray,
    state: MomentumState,
    alpha: float,
    sign: float = 1.0,
    transform: _Optional[GradientTransform] = None
) -> _np.ndarray:
    """One momentum iterative step. The state is updated in place.

    Args:
        delta (ndarray): The perturbation with values in [0, 1].
        grad (ndarray): The loss gradient at `delta`.
        state (MomentumState): The momentum.
        alpha (float): The step size.
        sign (float, optional): +1 to ascend, -1 to descend.
        transform (Optional[GradientTransform]): Applied to `grad`
            before accumulation.

    Returns:
        ndarray: The updated perturbation, clipped to [0, 1].
    """
    if transform is not None:
        grad = transform(grad)
    state.accumulate(grad)
    return _sign_step(delta, state, alpha, sign)


def nigm_step(
    delta: _np.ndarray,
    state: MomentumState,
    alpha: float,
    grad_fn: _Callable[[_np.ndarray], _np.ndarray],
    sign: float = 1.0,
    transform: _Optional[GradientTransform] = None
) -> _np.ndarray:
    """One Nesterov iterative step: the gradient is evaluated at the
    lookahead point delta + sign * alpha * mu * g, then the momentum
    update of `migm_step` follows.

    Args:
        delta (ndarray): The perturbation with values in [0, 1].
        state (MomentumState): The momentum.
        alpha (float): The step size.
        grad_fn (Callable[[ndarray], ndarray]): Computes the loss
            gradient at a perturbation.
        sign (float, optional): +1 to ascend, -1 to descend.
        transform (Optional[GradientTransform]): Applied to the
            gradient before accumulation.

    Returns:
        ndarray: The updated perturbation, clipped to [0, 1].
    """
    lookahead = delta + sign * alpha * state.mu * state.g
    grad = grad_fn(lookahead.astype(delta.dtype, copy=False))
    return migm_step(delta, grad, state, alpha, sign, transform)
