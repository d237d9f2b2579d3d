"""This module contains the tape recording differentiable operations
and the reverse-mode replay.
"""

import logging as _logging
import numpy as _np
import threading as _threading

from contextlib import AbstractContextManager as _AbstractContextManager
from dataclasses import dataclass as _dataclass
from types import TracebackType as _TracebackType
from typing import Callable as _Callable, Dict as _Dict, List as _List, \
    Optional as _Optional, Sequence as _Sequence, Tuple as _Tuple, \
    Type as _Type

from . import _exceptions
from ._tensor import Tensor as _Tensor


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


BackwardFunction = _Callable[
    [_np.ndarray], _Sequence[_Optional[_np.ndarray]]
]
"""Maps the gradient of an operation's output to the gradients of its
inputs (None for inputs that receive no gradient).
"""


@_dataclass(frozen=True)
class _Record:
    """A single executed operation."""

    __slots__ = ("output", "inputs", "backward")

    output: _Tensor
    """The produced tensor."""

    inputs: _Tuple[_Tensor, ...]
    """The tensor operands."""

    backward: BackwardFunction
    """The local vector-Jacobian product."""


_local = _threading.local()
"""Holds the stack of active tapes of the current thread."""


def _tape_stack() -> _List["Tape"]:
    """Obtain the active-tape stack of the current thread.

    Returns:
        List[Tape]: The stack.
    """
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = list()
        _local.stack = stack
    return stack


def active_tape() -> _Optional["Tape"]:
    """Obtain the innermost active tape of the current thread.

    Returns:
        Optional[Tape]: The tape or None if no tape is active.
    """
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape(_AbstractContextManager):
    """Ordered record of executed differentiable operations. Operations
    are recorded while the tape is entered as a context. A tape belongs
    to the thread that entered it.
    """

    __slots__ = ("_records", "_consumed")

    def __init__(self) -> None:
        """Initialize an empty tape."""
        self._records: _List[_Record] = list()
        """The operations in execution order."""
        self._consumed = False
        """Whether `backward` was already replayed."""

    def __enter__(self) -> "Tape":
        """Activate the tape for the current thread.

        Raises:
            TapeConsumedError: If the tape was already replayed.

        Returns:
            Tape: self
        """
        if self._consumed:
            raise _exceptions.TapeConsumedError(
                "The tape was already consumed by backward."
            )
        _tape_stack().append(self)
        return self

    def __exit__(
        self,
        exc_type: _Optional[_Type[BaseException]],
        exc_value: _Optional[BaseException],
        traceback: _Optional[_TracebackType]
    ) -> None:
        """Deactivate the tape.

        Args:
            exc_type (Optional[Type[BaseException]]): The exception type
                or None if no exception occured.
            exc_value (Optional[BaseException]): The exception value
                or None if no exception occured.
            traceback (Optional[TracebackType]): The traceback or None
                if no exception occured.
        """
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()
        else:  # pragma: no cover
            _logger.warning("Exiting a tape that is not the innermost one.")
            if self in stack:
                stack.remove(self)

    def __len__(self) -> int:
        return len(self._records)

    @property
    def consumed(self) -> bool:
        """Whether `backward` was already replayed."""
        return self._consumed

    def record(
        self,
        output: _Tensor,
        inputs: _Sequence[_Tensor],
        backward: BackwardFunction
    ) -> None:
        """Append an executed operation.

        Args:
            output (Tensor): The produced tensor.
            inputs (Sequence[Tensor]): The tensor operands.
            backward (BackwardFunction): The local vector-Jacobian
                product.

        Raises:
            TapeConsumedError: If the tape was already replayed.
        """
        if self._consumed:
            raise _exceptions.TapeConsumedError(
                "Cannot record on a consumed tape."
            )
        self._records.append(_Record(output, tuple(inputs), backward))

    def backward(self, loss: _Tensor) -> None:
        """Replay the recorded operations in reverse order and store the
        gradient of `loss` in the `grad` field of every leaf which
        requires it. Existing gradients are accumulated into. The tape
        is consumed afterwards.

        Args:
            loss (Tensor): The scalar to differentiate.

        Raises:
            NonScalarError: If `loss` has more than one element.
            NoTapeError: If `loss` was not recorded on this tape.
            TapeConsumedError: If the tape was already replayed.
        """
        if self._consumed:
            raise _exceptions.TapeConsumedError(
                "The tape was already consumed by backward."
            )
        if loss.size != 1:
            raise _exceptions.NonScalarError(
                f"backward requires a scalar loss, got shape {loss.shape}."
            )
        if loss._tape is not self:
            raise _exceptions.NoTapeError(
                "The loss was not recorded on this tape."
            )

        grads: _Dict[int, _np.ndarray] = {id(loss): _np.ones_like(loss.data)}
        leaves: _Dict[int, _Tensor] = dict()

        for rec in reversed(self._records):
            g = grads.pop(id(rec.output), None)
            if g is None:
                continue
            input_grads = rec.backward(g)
            for inp, ig in zip(rec.inputs, input_grads):
                if ig is None or not inp.requires_grad:
                    continue
                key = id(inp)
                prev = grads.get(key)
                grads[key] = ig if prev is None else prev + ig
                if inp.is_leaf:
                    leaves[key] = inp

        for key, leaf in leaves.items():
            g = grads[key].astype(leaf.dtype, copy=False)
            leaf.grad = g if leaf.grad is None else leaf.grad + g

        _logger.debug(
            "Replayed %s operations into %s leaves.",
            len(self._records), len(leaves)
        )
        self._records.clear()
        self._consumed = True


def backward(loss: _Tensor) -> None:
    """Populate the gradients of all leaves `loss` depends on by
    replaying the tape that produced it.

    Args:
        loss (Tensor): The scalar to differentiate.

    Raises:
        NonScalarError: If `loss` has more than one element.
        NoTapeError: If `loss` was not produced under an active tape.
        TapeConsumedError: If the tape was already replayed.
    """
    if loss.size != 1:
        raise _exceptions.NonScalarError(
            f"backward requires a scalar loss, got shape {loss.shape}."
        )
    tape = loss._tape
    if tape is None:
        raise _exceptions.NoTapeError(
            "The loss was not produced under an active tape."
        )
    tape.backward(loss)
