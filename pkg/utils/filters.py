"""
Distortion primitives shared by the attacks and the baselines:
seeded Gaussian noise, Gaussian blur and median blur.
"""

import numpy as np
from scipy import ndimage

from core.errors import ConfigError
from utils.image_buffer import ImageBuf


def _require_odd(ksize: int) -> None:
    if ksize < 1 or ksize % 2 == 0:
        raise ConfigError(f"kernel size must be a positive odd integer, got {ksize}")


def seeded_normal(shape, seed: int) -> np.ndarray:
    """Standard normal samples from a PCG64 generator seeded with `seed`."""
    rng = np.random.default_rng(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    return rng.standard_normal(shape)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit child seed for (seed, *keys)."""
    seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *keys])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def add_gaussian_noise(img: ImageBuf, delta: float, seed: int) -> ImageBuf:
    """
    Add delta-scaled i.i.d. standard normal noise and clip to [0, 1].

    Args:
        img: Source image
        delta: Noise scale (>= 0)
        seed: 64-bit generator seed

    Returns:
        Noisy image; identical to img when delta == 0
    """
    if delta < 0:
        raise ConfigError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return img
    noise = seeded_normal(img.shape, seed)
    return ImageBuf(np.clip(img.data + delta * noise, 0.0, 1.0))


def gaussian_kernel1d(ksize: int, sigma: float) -> np.ndarray:
    """Gaussian sampled at integer offsets -r..r, normalized to sum 1."""
    _require_odd(ksize)
    if sigma <= 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    r = ksize // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _smooth_axis(arr: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    # out = x + sum_i w_i (x_{+i} - x): exact on constant inputs
    r = len(weights) // 2
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (r, r)
    padded = np.pad(arr, pad, mode="edge")
    n = arr.shape[axis]
    acc = np.zeros_like(arr)
    for i, w in enumerate(weights):
        shifted = np.take(padded, np.arange(i, i + n), axis=axis)
        acc += w * (shifted - arr)
    return arr + acc


def smooth2d(plane: np.ndarray, ksize: int, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing over the first two axes with edge replication."""
    g = gaussian_kernel1d(ksize, sigma)
    return _smooth_axis(_smooth_axis(plane, g, 0), g, 1)


def gaussian_blur(img: ImageBuf, ksize: int, sigma: float) -> ImageBuf:
    """
    Separable Gaussian blur per channel, borders by edge replication.

    Raises:
        ConfigError: If ksize is even or sigma is not positive
    """
    return ImageBuf(np.clip(smooth2d(img.data, ksize, sigma), 0.0, 1.0))


def median_blur(img: ImageBuf, ksize: int) -> ImageBuf:
    """
    Per-channel median over a ksize x ksize window, borders by edge replication.

    Raises:
        ConfigError: If ksize is even
    """
    _require_odd(ksize)
    out = ndimage.median_filter(img.data, size=(ksize, ksize, 1), mode="nearest")
    return ImageBuf(out)
