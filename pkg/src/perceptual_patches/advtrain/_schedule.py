WARMUP_END = 0.25
"""The fraction of training during which only the clean loss counts."""

DECAY_END = 0.5
"""The fraction of training at which the clean weight reaches its
floor.
"""

LAMBDA_FLOOR = 0.5
"""The final weight of the clean loss."""


def lambda_schedule(epoch: float, total_epochs: int) -> float:
    """The weight of the clean loss in iterative adversarial training:
    1 during the first quarter, then decreasing linearly to 0.5 at half
    time, and 0.5 afterwards.

    Args:
        epoch (float): The (possibly fractional) epoch e.
        total_epochs (int): The number of epochs E.

    Raises:
        ValueError: If E is not positive or e lies outside [0, E].

    Returns:
        float: The weight in [0.5, 1].
    """
    if total_epochs <= 0:
        raise ValueError(f"E must be positive, got {total_epochs}.")
    if not 0 <= epoch <= total_epochs:
        raise ValueError(f"Epoch {epoch} lies outside [0, {total_epochs}].")
    warm = WARMUP_END * total_epochs
    decay = DECAY_END * total_epochs
    if epoch <= warm:
        return 1.0
    if epoch >= decay:
        return LAMBDA_FLOOR
    frac = (epoch - warm) / (decay - warm)
    return 1.0 - (1.0 - LAMBDA_FLOOR) * frac
