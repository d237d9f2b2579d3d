import logging as _logging

from arrow import Arrow as _Arrow
from datetime import timedelta as _timedelta
from typing import Optional as _Optional


_logger = _logging.getLogger(__name__)
"""The logger for this module."""


class TimeBudget:
    """A soft wall-clock budget. Expiry is only checked between epochs,
    so a running epoch is never interrupted.
    """

    __slots__ = ("_budget", "_start_time", "_expired")

    def __init__(self, budget: _Optional[_timedelta]) -> None:
        """Initialize a `TimeBudget`.

        Args:
            budget (Optional[timedelta]): The time after which training
                should stop or None, to disable the budget.
        """
        self._budget = budget
        """Stores the budget."""
        self._start_time: _Optional[_Arrow] = None
        """The time `start` was called."""
        self._expired = False
        """Whether the budget was found to be exhausted."""

    def start(self) -> None:
        """Start the clock."""
        self._start_time = _Arrow.now()
        _logger.debug("Setting start time at %s.", self._start_time)

    @property
    def elapsed(self) -> _timedelta:
        """The time since `start`.

        Raises:
            RuntimeError: If the clock was not started.
        """
        if self._start_time is None:
            raise RuntimeError("The clock was not started.")
        return _Arrow.now() - self._start_time

    @property
    def expired(self) -> bool:
        """Whether a previous `check` found the budget exhausted."""
        return self._expired

    def check(self) -> bool:
        """Check whether the budget is exhausted.

        Returns:
            bool: False if there is no budget, else whether the elapsed
                time reached it.
        """
        if self._budget is None:
            return False
        if not self._expired and self.elapsed >= self._budget:
            _logger.warning("Time budget of %s exhausted.", self._budget)
            self._expired = True
        return self._expired
