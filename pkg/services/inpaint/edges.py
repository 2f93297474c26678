"""
Canny edge extraction used as the edge side channel of PEEL-O.
"""

import numpy as np
from scipy import ndimage

from core import settings
from core.errors import ConfigError
from utils.image_buffer import ImageBuf

# Offsets of the "forward" neighbor along the quantized gradient direction
_DIRECTIONS = {
    0: (0, 1),    # horizontal gradient -> compare left/right
    1: (1, 1),    # 45 degrees
    2: (1, 0),    # vertical gradient -> compare up/down
    3: (1, -1),   # 135 degrees
}


def _neighbor(arr: np.ndarray, dy: int, dx: int) -> np.ndarray:
    padded = np.pad(arr, 1, mode="constant")
    h, w = arr.shape
    return padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]


def non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """
    Keep pixels that are maximal along their gradient direction.

    Ties are broken toward the forward neighbor (>= behind, > ahead) so a
    symmetric ridge yields a one-pixel-wide line.
    """
    angle = (np.degrees(np.arctan2(gy, gx)) + 180.0) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    out = np.zeros_like(mag)
    for s, (dy, dx) in _DIRECTIONS.items():
        sel = sector == s
        ahead = _neighbor(mag, dy, dx)
        behind = _neighbor(mag, -dy, -dx)
        keep = sel & (mag >= behind) & (mag > ahead) & (mag > 0)
        out[keep] = mag[keep]
    return out


def hysteresis(nms: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Weak pixels survive only when 8-connected to a strong pixel."""
    weak = nms >= lo
    strong = nms >= hi
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros_like(weak)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]


def extract_edges(
    img: ImageBuf,
    sigma: float = settings.CANNY_SIGMA,
    lo: float = settings.CANNY_LO,
    hi: float = settings.CANNY_HI,
) -> np.ndarray:
    """
    Canny edge map.

    Channel mean, Gaussian smoothing, Sobel gradients, non-maximum
    suppression and double-threshold hysteresis on the gradient magnitude
    normalized by its maximum.

    Args:
        img: Source image
        sigma: Gaussian smoothing sigma
        lo: Low threshold in [0, 1)
        hi: High threshold in (lo, 1]

    Returns:
        Boolean raster (height, width)

    Raises:
        ConfigError: If lo >= hi or a threshold is negative
    """
    if lo < 0 or lo >= hi:
        raise ConfigError(f"need 0 <= lo < hi, got lo={lo}, hi={hi}")
    gray = img.gray()
    smooth = ndimage.gaussian_filter(gray, sigma=sigma, mode="nearest")
    gx = ndimage.sobel(smooth, axis=1, mode="nearest")
    gy = ndimage.sobel(smooth, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = float(mag.max())
    if peak <= 1e-12:
        return np.zeros(gray.shape, dtype=bool)
    mag = mag / peak
    nms = non_max_suppression(mag, gx, gy)
    return hysteresis(nms, lo, hi)
