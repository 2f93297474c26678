"""
Side-by-side PNG grids of containers and reveals.
"""

import logging
from pathlib import Path
from typing import List, Sequence

import numpy as np

from core import settings
from utils.image_buffer import ImageBuf, save_image

logger = logging.getLogger(__name__)


def _as_rgb(img: ImageBuf) -> np.ndarray:
    if img.channels == 3:
        return img.data
    return np.repeat(img.data, 3, axis=2)


def compose_grid(rows: Sequence[Sequence[ImageBuf]], margin: int = settings.FIGURE_MARGIN) -> ImageBuf:
    """
    Tile equally sized images on a white canvas.

    Tile (r, c) starts at (c * (W + margin), r * (H + margin)), so the
    canvas is cols * (W + margin) wide and rows * (H + margin) tall.
    Grayscale tiles are promoted to RGB when any tile is RGB.
    """
    tiles = [img for row in rows for img in row]
    if not tiles:
        raise ValueError("compose_grid needs at least one image")
    height, width = tiles[0].height, tiles[0].width
    for img in tiles:
        if (img.height, img.width) != (height, width):
            raise ValueError("compose_grid needs equally sized images")
    channels = 3 if any(img.channels == 3 for img in tiles) else 1
    n_cols = max(len(row) for row in rows)
    canvas = np.ones((len(rows) * (height + margin), n_cols * (width + margin), channels))
    for r, row in enumerate(rows):
        for c, img in enumerate(row):
            y, x = r * (height + margin), c * (width + margin)
            data = _as_rgb(img) if channels == 3 else img.data
            canvas[y : y + height, x : x + width] = data
    return ImageBuf(canvas)


def probe_figure(
    containers: List[ImageBuf],
    reveals: List[ImageBuf],
    path: Path,
    margin: int = settings.FIGURE_MARGIN,
) -> ImageBuf:
    """2 x 3 vulnerability grid: containers on top, their reveals below."""
    grid = compose_grid([containers, reveals], margin)
    save_image(grid, path)
    logger.info(f"Wrote probe figure {path} ({grid.width}x{grid.height})")
    return grid


def attack_figure(
    cover: ImageBuf,
    container: ImageBuf,
    attacked: ImageBuf,
    revealed_clean: ImageBuf,
    revealed_attacked: ImageBuf,
    path: Path,
    margin: int = settings.FIGURE_MARGIN,
) -> ImageBuf:
    """One row: cover, container, attacked container, clean reveal, attacked reveal."""
    grid = compose_grid([[cover, container, attacked, revealed_clean, revealed_attacked]], margin)
    save_image(grid, path)
    logger.info(f"Wrote attack figure {path}")
    return grid
