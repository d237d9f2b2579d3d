import logging as _logging
import math as _math
import numpy as _np

from typing import Dict as _Dict, Mapping as _Mapping, \
    Optional as _Optional

from .. import autodiff as _ad


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


class SGD:
    """Stochastic gradient descent with heavy-ball momentum and optional
    clipping of the global gradient norm:
    v <- momentum * v + g; p <- p - learning_rate * v.
    """

    __slots__ = ("_params", "_velocity", "learning_rate", "momentum",
                 "grad_clip")

    def __init__(
        self,
        params: _Mapping[str, _ad.Tensor],
        learning_rate: float,
        momentum: float = 0.9,
        grad_clip: _Optional[float] = None
    ) -> None:
        """Initialize the optimizer with zero velocity.

        Args:
            params (Mapping[str, Tensor]): The parameters to update.
            learning_rate (float): The step size.
            momentum (float, optional): The momentum. Defaults to 0.9.
            grad_clip (Optional[float]): The maximum global gradient
                norm, or None to disable clipping.
        """
        self._params = dict(params)
        self._velocity: _Dict[str, _np.ndarray] = {
            k: _np.zeros_like(p.data) for k, p in self._params.items()
        }
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.grad_clip = grad_clip

    def zero_grad(self) -> None:
        """Drop the accumulated gradients."""
        for p in self._params.values():
            p.zero_grad()

    def grad_norm(self) -> float:
        """The global L2 norm of the current gradients."""
        total = 0.0
        for p in self._params.values():
            if p.grad is not None:
                total += float(_np.sum(_np.square(p.grad, dtype=_np.float64)))
        return _math.sqrt(total)

    def step(self) -> float:
        """Apply one update from the accumulated gradients and clear
        them. Parameters without a gradient only coast on their
        velocity.

        Returns:
            float: The gradient norm before clipping.
        """
        norm = self.grad_norm()
        scale = 1.0
        if self.grad_clip is not None and norm > self.grad_clip:
            scale = self.grad_clip / norm
            _logger.debug("Clipping gradient norm %.4g.", norm)
        for name, p in self._params.items():
            v = self._velocity[name]
            v *= self.momentum
            if p.grad is not None:
                g = p.grad if scale == 1.0 else p.grad * scale
                v += g.astype(v.dtype, copy=False)
            p.data -= self.learning_rate * v
            p.zero_grad()
        return norm
