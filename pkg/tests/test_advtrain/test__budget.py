import arrow
import pytest

from datetime import timedelta

from perceptual_patches.advtrain import TimeBudget


T0 = arrow.Arrow(2024, 1, 1, 12, 0, 0)


def test_budget_expires(mocker):
    """Test that the budget expires once the elapsed time reaches it and
    stays expired.
    """
    now = mocker.patch.object(
        arrow.Arrow, "now",
        side_effect=[T0, T0.shift(seconds=5), T0.shift(seconds=10)]
    )
    budget = TimeBudget(timedelta(seconds=10))
    budget.start()
    assert not budget.check()
    assert not budget.expired
    assert budget.check()
    assert budget.expired
    assert budget.check()
    assert now.call_count == 3


def test_elapsed(mocker):
    """Test the time since the start."""
    mocker.patch.object(
        arrow.Arrow, "now", side_effect=[T0, T0.shift(minutes=2)]
    )
    budget = TimeBudget(None)
    budget.start()
    assert budget.elapsed == timedelta(minutes=2)


def test_no_budget_never_expires():
    """Test that a disabled budget needs no clock."""
    budget = TimeBudget(None)
    assert not budget.check()
    assert not budget.expired


def test_elapsed_needs_start():
    """Test that the clock must be started first."""
    with pytest.raises(RuntimeError, match=".*not started.*"):
        TimeBudget(timedelta(seconds=1)).elapsed
