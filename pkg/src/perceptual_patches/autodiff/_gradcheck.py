import numpy as _np

from dataclasses import dataclass as _dataclass
from typing import Callable as _Callable, Optional as _Optional, \
    Sequence as _Sequence

from ._tape import Tape as _Tape
from ._tensor import Tensor as _Tensor


@_dataclass(frozen=True)
class GradientCheck:
    """The outcome of comparing analytic and numerical gradients."""

    __slots__ = ("max_rel_error", "input_index", "flat_index")

    max_rel_error: float
    """The largest relative error over all checked entries."""

    input_index: int
    """The index of the input holding the worst entry."""

    flat_index: int
    """The flat index of the worst entry inside its input."""


def relative_error(a: float, b: float) -> float:
    """The relative difference of two values with the denominator
    max(|a|, |b|, 1e-8).
    """
    return abs(a - b) / max(abs(a), abs(b), 1e-8)


def check_gradient(
    fn: _Callable[[], _Tensor],
    inputs: _Sequence[_Tensor],
    eps: float = 1e-5,
    max_per_input: _Optional[int] = None,
    seed: int = 0
) -> GradientCheck:
    """Compare the gradients obtained by `backward` with central finite
    differences. The inputs are perturbed in place and restored.

    Args:
        fn (Callable[[], Tensor]): Computes a scalar from the inputs it
            closes over.
        inputs (Sequence[Tensor]): The leaves to check. They must have
            `requires_grad` set.
        eps (float, optional): The finite-difference step. Defaults to
            1e-5.
        max_per_input (Optional[int]): If given, only this many randomly
            chosen entries of each input are checked.
        seed (int, optional): The seed selecting the checked entries.
            Defaults to 0.

    Raises:
        ValueError: If `inputs` is empty or an input does not require a
            gradient.

    Returns:
        GradientCheck: The worst relative error and where it occured.
    """
    if len(inputs) == 0:
        raise ValueError("No inputs to check.")
    for t in inputs:
        if not t.requires_grad:
            raise ValueError("Every checked input must require a gradient.")

    saved = [t.grad for t in inputs]
    for t in inputs:
        t.zero_grad()
    with _Tape() as tape:
        loss = fn()
    tape.backward(loss)
    analytic = [
        _np.zeros_like(t.data) if t.grad is None else t.grad.copy()
        for t in inputs
    ]
    for t, g in zip(inputs, saved):
        t.grad = g

    rng = _np.random.default_rng(seed)
    worst = GradientCheck(0.0, 0, 0)
    for i, t in enumerate(inputs):
        # The flat view must alias the data for in-place perturbation.
        t.data = _np.ascontiguousarray(t.data)
        flat = t.data.reshape(-1)
        indices = _np.arange(flat.size)
        if max_per_input is not None and max_per_input < flat.size:
            indices = _np.sort(
                rng.choice(flat.size, size=max_per_input, replace=False)
            )
        for j in indices:
            orig = flat[j]
            flat[j] = orig + eps
            plus = fn().item()
            flat[j] = orig - eps
            minus = fn().item()
            flat[j] = orig
            numeric = (plus - minus) / (2 * eps)
            err = relative_error(float(analytic[i].reshape(-1)[j]), numeric)
            if err > worst.max_rel_error:
                worst = GradientCheck(err, i, int(j))
    return worst
