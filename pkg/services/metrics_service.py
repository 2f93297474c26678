"""
Distance metrics and the C/S reporting conventions.

RMSE is the norm used for every theory-facing computation; PSNR and VIF are
the reporting metrics.
"""

import logging
import math
from typing import Callable, Dict, Iterable, List

import numpy as np
import pandas as pd

from core import settings
from core.errors import ConfigError, EmptyCorpusError, MetricDomainError
from schemas.report import MetricRecord
from utils.filters import smooth2d
from utils.image_buffer import ImageBuf, require_same_shape

logger = logging.getLogger(__name__)

VIF_SCALES = 4
VIF_EPS = 1e-10


def rmse(a: ImageBuf, b: ImageBuf) -> float:
    """Root mean squared difference over all values."""
    require_same_shape(a, b)
    diff = a.data - b.data
    return float(np.sqrt(np.mean(diff * diff)))


def mae(a: ImageBuf, b: ImageBuf) -> float:
    """Mean absolute difference over all values."""
    require_same_shape(a, b)
    return float(np.mean(np.abs(a.data - b.data)))


def psnr(a: ImageBuf, b: ImageBuf) -> float:
    """
    Peak signal-to-noise ratio with peak 1.0.

    Returns:
        dB value, or math.inf when the images are identical
    """
    require_same_shape(a, b)
    diff = a.data - b.data
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _vif_terms(ref: np.ndarray, dist: np.ndarray, win: int, sigma_nsq: float):
    sigma = win / 5.0
    mu1 = smooth2d(ref, win, sigma)
    mu2 = smooth2d(dist, win, sigma)
    sigma1_sq = np.maximum(smooth2d(ref * ref, win, sigma) - mu1 * mu1, 0.0)
    sigma2_sq = np.maximum(smooth2d(dist * dist, win, sigma) - mu2 * mu2, 0.0)
    sigma12 = smooth2d(ref * dist, win, sigma) - mu1 * mu2

    g = sigma12 / (sigma1_sq + VIF_EPS)
    sv_sq = sigma2_sq - g * sigma12

    flat_ref = sigma1_sq < VIF_EPS
    g[flat_ref] = 0.0
    sv_sq[flat_ref] = sigma2_sq[flat_ref]
    sigma1_sq[flat_ref] = 0.0

    flat_dist = sigma2_sq < VIF_EPS
    g[flat_dist] = 0.0
    sv_sq[flat_dist] = 0.0

    negative = g < 0
    sv_sq[negative] = sigma2_sq[negative]
    g[negative] = 0.0
    sv_sq = np.maximum(sv_sq, VIF_EPS)

    num = np.sum(np.log2(1.0 + g * g * sigma1_sq / (sv_sq + sigma_nsq)))
    den = np.sum(np.log2(1.0 + sigma1_sq / sigma_nsq))
    return float(num), float(den)


def vif(ref: ImageBuf, dist: ImageBuf, sigma_nsq: float = settings.VIF_SIGMA_NSQ) -> float:
    """
    Pixel-domain multiscale visual information fidelity.

    Works on the channel mean scaled to [0, 255]. Scale s in 1..4 uses a
    Gaussian window of side 2^(5-s)+1 (sigma = side/5); scales after the first
    are produced by smoothing with that window and decimating by 2.
    Not symmetric in its arguments.

    Args:
        ref: Reference image
        dist: Distorted image
        sigma_nsq: Visual noise variance

    Returns:
        num / den; 1.0 for identical images

    Raises:
        MetricDomainError: If an image side is below 32, or the reference is
            flat and the pair is not identical
    """
    require_same_shape(ref, dist)
    if min(ref.width, ref.height) < settings.VIF_MIN_SIDE:
        raise MetricDomainError(
            f"VIF needs both sides >= {settings.VIF_MIN_SIDE}, got {ref.width}x{ref.height}"
        )
    r = ref.gray() * 255.0
    d = dist.gray() * 255.0
    num = den = 0.0
    for scale in range(1, VIF_SCALES + 1):
        win = 2 ** (VIF_SCALES - scale + 1) + 1
        if scale > 1:
            r = smooth2d(r, win, win / 5.0)[::2, ::2]
            d = smooth2d(d, win, win / 5.0)[::2, ::2]
        n, m = _vif_terms(r, d, win, sigma_nsq)
        num += n
        den += m
    if den <= 0.0:
        if np.array_equal(ref.data, dist.data):
            return 1.0
        raise MetricDomainError("VIF undefined: reference has no variance")
    return num / den


DISTANCES: Dict[str, Callable[[ImageBuf, ImageBuf], float]] = {
    "rmse": rmse,
    "mae": mae,
}


def get_distance(metric: str) -> Callable[[ImageBuf, ImageBuf], float]:
    """
    Look up a norm-like distance by id.

    Raises:
        ConfigError: If the id is unknown
    """
    try:
        return DISTANCES[metric]
    except KeyError:
        raise ConfigError(f"unknown distance {metric!r}; choose from {sorted(DISTANCES)}")


def report_pair(
    container: ImageBuf,
    attacked: ImageBuf,
    revealed_clean: ImageBuf,
    revealed_attacked: ImageBuf,
) -> MetricRecord:
    """
    Build the C/S metric record for one attacked container.

    C-metrics compare the pre-attack container with the attacked one;
    S-metrics compare the clean reveal with the post-attack reveal.

    Raises:
        DimensionMismatchError: If any pair differs in shape
    """
    return MetricRecord(
        psnr_c=psnr(container, attacked),
        psnr_s=psnr(revealed_clean, revealed_attacked),
        vif_c=vif(container, attacked),
        vif_s=vif(revealed_clean, revealed_attacked),
        rmse_c=min(rmse(container, attacked), 1.0),
        rmse_s=min(rmse(revealed_clean, revealed_attacked), 1.0),
    )


def aggregate(records: Iterable[MetricRecord]) -> MetricRecord:
    """
    Column means of a set of records (+inf PSNR propagates into the mean).

    Raises:
        EmptyCorpusError: If no records are given
    """
    rows: List[dict] = [r.model_dump() for r in records]
    if not rows:
        raise EmptyCorpusError("cannot aggregate zero metric records")
    means = pd.DataFrame(rows).mean(axis=0)
    return MetricRecord(**{k: float(v) for k, v in means.items()})
