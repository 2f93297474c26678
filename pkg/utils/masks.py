"""
Removal masks and l x l box geometry.
"""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from utils.image_buffer import ImageBuf

Center = Tuple[int, int]
Box = Tuple[int, int, int, int]  # y0, y1, x0, x1 (half-open, clipped)


def cell_of(center: Center, k: int) -> Tuple[int, int]:
    """(row, col) of the grid cell whose center is (m, n)."""
    m, n = center
    return m // k, n // k


def box_bounds(center: Center, k: int, l: int, height: int, width: int) -> Box:
    """
    Clipped l x l box around the k x k cell containing `center`.

    The box extends floor((l-k)/2) pixels above/left of the cell and the rest
    below/right, so for even l - k it is centered on the cell.
    """
    row, col = cell_of(center, k)
    before = (l - k) // 2
    after = (l - k) - before
    y0 = max(row * k - before, 0)
    x0 = max(col * k - before, 0)
    y1 = min(row * k + k + after, height)
    x1 = min(col * k + k + after, width)
    return y0, y1, x0, x1


def cell_bounds(center: Center, k: int) -> Box:
    row, col = cell_of(center, k)
    return row * k, row * k + k, col * k, col * k + k


@dataclass(frozen=True, eq=False)
class RemovalMask:
    """Binary raster over the padded canvas: True = kept, False = removed."""

    keep: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.keep, dtype=bool).copy()
        if arr.ndim != 2:
            raise ValueError(f"RemovalMask must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "keep", arr)

    @property
    def height(self) -> int:
        return self.keep.shape[0]

    @property
    def width(self) -> int:
        return self.keep.shape[1]

    @property
    def holes(self) -> np.ndarray:
        return ~self.keep

    @property
    def removed_count(self) -> int:
        return int(np.count_nonzero(~self.keep))

    @classmethod
    def full(cls, height: int, width: int) -> "RemovalMask":
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def from_boxes(cls, height: int, width: int, boxes: Iterable[Box]) -> "RemovalMask":
        keep = np.ones((height, width), dtype=bool)
        for y0, y1, x0, x1 in boxes:
            keep[y0:y1, x0:x1] = False
        return cls(keep)

    def to_image(self) -> ImageBuf:
        """0 = hole, 1 = keep, as a grayscale ImageBuf (mask.png layout)."""
        return ImageBuf(self.keep.astype(np.float64))
