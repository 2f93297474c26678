"""
Empirical (l, gamma) measurement of an inpainter.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from core import settings
from core.errors import ConfigError, EmptyCorpusError
from services.inpaint.contract import InpaintRequest, Inpainter
from services.inpaint.edges import extract_edges
from services.inpaint.side_channels import make_dr, masked_copy
from services.metrics_service import get_distance
from utils.filters import derive_seed
from utils.image_buffer import ImageBuf
from utils.masks import Box, RemovalMask, box_bounds

logger = logging.getLogger(__name__)


def sample_hole_box(height: int, width: int, l: int, rng: np.random.Generator) -> Box:
    """Uniformly placed l x l box fully inside a height x width canvas."""
    if l > height or l > width:
        raise ConfigError(f"hole side l={l} does not fit a {width}x{height} image")
    y0 = int(rng.integers(0, height - l + 1))
    x0 = int(rng.integers(0, width - l + 1))
    return y0, y0 + l, x0, x0 + l


def sample_grid_mask(
    width: int,
    height: int,
    k: int,
    l: int,
    rng: np.random.Generator,
    count: int = 1,
) -> RemovalMask:
    """
    Remove the l-boxes of `count` distinct random grid cells.

    Holes land exactly where the attack schedulers put them, including
    clipping at the canvas border.
    """
    rows, cols = height // k, width // k
    if rows * cols == 0:
        raise ConfigError(f"k={k} does not fit a {width}x{height} image")
    count = min(count, rows * cols)
    picks = rng.choice(rows * cols, size=count, replace=False)
    boxes = []
    for p in sorted(int(v) for v in picks):
        row, col = divmod(p, cols)
        center = (row * k + k // 2, col * k + k // 2)
        boxes.append(box_bounds(center, k, l, height, width))
    return RemovalMask.from_boxes(height, width, boxes)


def estimate_gamma(
    inpainter: Inpainter,
    corpus: Sequence[ImageBuf],
    l: int,
    trials: int,
    metric: str = "rmse",
    seed: int = 0,
    aligned_k: Optional[int] = None,
    use_edge: bool = False,
    use_dr: bool = False,
    delta: float = settings.PEELO_DELTA,
) -> float:
    """
    Mean D(x, I(x masked)) over random l x l holes.

    Trial t uses corpus image t mod N and a hole drawn from a generator
    seeded with `seed`, so the estimate is reproducible.

    Args:
        inpainter: Inpainter under test
        corpus: Clean images
        l: Hole side
        trials: Number of (image, hole) draws
        metric: Distance id ('rmse' or 'mae')
        seed: Sampling seed
        aligned_k: When set, holes are grid-aligned boxes around k-cells
        use_edge: Supply the clean image's edge map
        use_dr: Supply a delta-noised copy of the hole content

    Returns:
        gamma_hat

    Raises:
        EmptyCorpusError: If corpus is empty
        ConfigError: If trials < 1 or the hole does not fit
    """
    if not corpus:
        raise EmptyCorpusError("estimate_gamma needs at least one image")
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    distance = get_distance(metric)
    rng = np.random.default_rng(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))

    total = 0.0
    for t in range(trials):
        x = corpus[t % len(corpus)]
        if aligned_k is not None:
            mask = sample_grid_mask(x.width, x.height, aligned_k, l, rng)
        else:
            mask = RemovalMask.from_boxes(
                x.height, x.width, [sample_hole_box(x.height, x.width, l, rng)]
            )
        edge = extract_edges(x) if use_edge else None
        dr = make_dr(x, mask, delta, derive_seed(seed, t)) if use_dr else None
        req = InpaintRequest(masked_copy(x, mask), mask, edge=edge, dr=dr)
        total += distance(x, inpainter(req))

    gamma_hat = total / trials
    logger.info(f"gamma_hat={gamma_hat:.6f} over {trials} trials (l={l}, metric={metric})")
    return gamma_hat
