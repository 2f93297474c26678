"""
Shared fixtures: synthetic "natural" images and uniform random secrets.
"""

from pathlib import Path
from typing import Callable, List

import numpy as np
import pytest

from utils.filters import smooth2d
from utils.image_buffer import ImageBuf, save_image


def make_natural(size: int = 64, seed: int = 0, channels: int = 3, width: int = None) -> ImageBuf:
    """Smoothed noise plus a gradient and a hard edge, rescaled to [0, 1]."""
    width = width or size
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:width]
    yy = yy / size
    xx = xx / width
    planes = []
    for ch in range(channels):
        noise = smooth2d(rng.random((size, width)), 9, 2.0)
        edge_at = 0.3 + 0.4 * rng.random()
        plane = 0.5 * noise + 0.3 * (xx if ch % 2 else yy) + 0.2 * (xx > edge_at)
        planes.append(plane)
    data = np.stack(planes, axis=2)
    data = (data - data.min()) / (data.max() - data.min())
    return ImageBuf(data)


def make_random(size: int = 64, seed: int = 0, channels: int = 3, width: int = None) -> ImageBuf:
    """Uniform random 8-bit image."""
    width = width or size
    rng = np.random.default_rng(seed)
    return ImageBuf.from_bytes(rng.integers(0, 256, size=(size, width, channels), dtype=np.uint8))


@pytest.fixture
def natural_image() -> Callable[..., ImageBuf]:
    return make_natural


@pytest.fixture
def random_image() -> Callable[..., ImageBuf]:
    return make_random


@pytest.fixture
def natural_corpus() -> List[ImageBuf]:
    return [make_natural(64, seed) for seed in range(4)]


@pytest.fixture
def corpus_dir(tmp_path) -> Path:
    """Three 48x48 RGB PNGs on disk."""
    folder = tmp_path / "corpus"
    folder.mkdir()
    for i in range(3):
        save_image(make_natural(48, 100 + i), folder / f"img{i:02d}.png")
    return folder
