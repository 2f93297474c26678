"""
DR side channel: a heavily distorted copy of the removed content.
"""

import logging

import numpy as np

from core.errors import ConfigError, DimensionMismatchError
from utils.filters import seeded_normal
from utils.image_buffer import ImageBuf
from utils.masks import RemovalMask

logger = logging.getLogger(__name__)


def make_dr(c_prime: ImageBuf, mask: RemovalMask, delta: float, seed: int) -> ImageBuf:
    """
    clip(c' + delta * n) on hole pixels, 0 elsewhere.

    The noise field covers the whole canvas and is drawn from `seed`, so the
    value at a pixel does not depend on which other pixels are holes.

    Args:
        c_prime: Container before removal
        mask: Removal mask (False = hole)
        delta: Noise scale (>= 0)
        seed: 64-bit generator seed

    Returns:
        ImageBuf shaped like c_prime, zero wherever mask is True
    """
    if delta < 0:
        raise ConfigError(f"delta must be >= 0, got {delta}")
    if mask.keep.shape != (c_prime.height, c_prime.width):
        raise DimensionMismatchError(f"mask {mask.keep.shape} does not match image {c_prime.width}x{c_prime.height}")
    if delta == 0:
        logger.warning("DR with delta=0 hands the original hole content to the inpainter")

    noisy = c_prime.data + delta * seeded_normal(c_prime.shape, seed)
    dr = np.where(mask.holes[:, :, None], np.clip(noisy, 0.0, 1.0), 0.0)
    return ImageBuf(dr)


def dr_matches_support(dr: ImageBuf, mask: RemovalMask) -> bool:
    """True when dr vanishes on every kept pixel."""
    return not np.any(dr.data[mask.keep] != 0.0)


def masked_copy(img: ImageBuf, mask: RemovalMask) -> ImageBuf:
    """img with every hole pixel set to 0 in all channels."""
    if mask.keep.shape != (img.height, img.width):
        raise DimensionMismatchError("mask does not match image")
    return ImageBuf(np.where(mask.keep[:, :, None], img.data, 0.0))
