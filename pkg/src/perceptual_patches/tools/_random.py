import numpy as _np


def derive_rng(seed: int, *keys: int) -> _np.random.Generator:
    """Create a random generator whose stream is fully determined by a
    seed and a path of integer keys, for example (seed, scene index).
    Streams for different keys are independent.

    Args:
        seed (int): The root seed.
        *keys (int): The derivation path.

    Raises:
        ValueError: If the seed or a key is negative.

    Returns:
        Generator: The generator.
    """
    entropy = [int(seed), *(int(k) for k in keys)]
    if any(e < 0 for e in entropy):
        raise ValueError(f"Seeds and keys must be non-negative: {entropy}.")
    return _np.random.default_rng(entropy)
