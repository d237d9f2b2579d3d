import numpy as _np

from scipy.signal import correlate2d as _correlate2d
from scipy.stats import norm as _norm


TI_KERNEL_SIZE = 15
"""The default side of the smoothing kernel."""

TI_SIGMA = 3.0
"""The default number of standard deviations the kernel spans on each
side.
"""


def gaussian_kernel(
    size: int = TI_KERNEL_SIZE, sigma: float = TI_SIGMA
) -> _np.ndarray:
    """A unit-mass 2-D Gaussian sampled at `size` points between -sigma
    and +sigma standard deviations per axis.

    Raises:
        ValueError: If `size` is not a positive odd number or `sigma`
            is not positive.
    """
    if size < 1 or size % 2 == 0:
        raise ValueError(f"The kernel size must be odd, got {size}.")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}.")
    x = _np.linspace(-sigma, sigma, size)
    k1 = _norm.pdf(x)
    k = _np.outer(k1, k1)
    return k / k.sum()


def ti_smooth(
    grad: _np.ndarray,
    kernel_size: int = TI_KERNEL_SIZE,
    sigma: float = TI_SIGMA
) -> _np.ndarray:
    """Smooth a gradient with a Gaussian kernel, separately for every
    channel, with zero padding at the borders.

    Args:
        grad (ndarray): A gradient of shape [H, W] or [C, H, W].
        kernel_size (int, optional): The odd kernel side.
        sigma (float, optional): The kernel extent in standard
            deviations.

    Raises:
        ValueError: If the kernel size is even or the gradient is
            neither 2-D nor 3-D.

    Returns:
        ndarray: The smoothed gradient.
    """
    kernel = gaussian_kernel(kernel_size, sigma)
    g = _np.asarray(grad)
    if g.ndim == 2:
        return _correlate2d(g, kernel, mode="same").astype(g.dtype)
    if g.ndim != 3:
        raise ValueError(f"Expected a 2-D or 3-D gradient, got {g.shape}.")
    return _np.stack([
        _correlate2d(c, kernel, mode="same") for c in g
    ]).astype(g.dtype)
