"""
Inpainter contract: request type, result type and the zero-fill inpainter.
"""

from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from core.errors import DimensionMismatchError, KeptPixelViolation
from utils.image_buffer import ImageBuf
from utils.masks import RemovalMask


@dataclass(frozen=True, eq=False)
class InpaintRequest:
    """
    Inputs of one inpainting call.

    masked: container with holes already zeroed
    mask: True where pixels are kept
    edge: optional boolean edge raster of the full container
    dr: optional distorted hole content, zero outside holes
    """

    masked: ImageBuf
    mask: RemovalMask
    edge: Optional[np.ndarray] = None
    dr: Optional[ImageBuf] = None

    def __post_init__(self):
        shape = (self.masked.height, self.masked.width)
        if self.mask.keep.shape != shape:
            raise DimensionMismatchError(f"mask {self.mask.keep.shape} does not match image {shape}")
        holes = self.mask.holes
        if np.any(self.masked.data[holes] != 0.0):
            raise ValueError("masked image has non-zero values inside holes")
        if self.edge is not None:
            edge = np.asarray(self.edge, dtype=bool)
            if edge.shape != shape:
                raise DimensionMismatchError(f"edge map {edge.shape} does not match image {shape}")
            object.__setattr__(self, "edge", edge)
        if self.dr is not None:
            if self.dr.shape != self.masked.shape:
                raise DimensionMismatchError("dr does not match masked image")
            if np.any(self.dr.data[self.mask.keep] != 0.0):
                raise ValueError("dr must be zero outside holes")


@dataclass(frozen=True, eq=False)
class InpaintResult:
    image: ImageBuf
    converged: bool = True
    iterations: int = 0


class Inpainter(Protocol):
    """Anything that maps an InpaintRequest to a repaired ImageBuf."""

    name: str

    def __call__(self, req: InpaintRequest) -> ImageBuf:
        ...


def zero_fill(req: InpaintRequest) -> ImageBuf:
    """Degenerate inpainter: holes stay zero, kept pixels untouched."""
    return req.masked


class ZeroFillInpainter:
    name = "zero"

    def __call__(self, req: InpaintRequest) -> ImageBuf:
        return zero_fill(req)


def check_kept_pixels(req: InpaintRequest, out: ImageBuf, tol: float = 0.0) -> None:
    """
    Verify an inpainter left every kept pixel within `tol` of its input.

    Raises:
        DimensionMismatchError: If the output shape differs
        KeptPixelViolation: If any kept value moved by more than tol
    """
    if out.shape != req.masked.shape:
        raise DimensionMismatchError(f"inpainted image {out.shape} vs request {req.masked.shape}")
    keep = req.mask.keep
    drift = np.abs(out.data[keep] - req.masked.data[keep])
    if drift.size and float(drift.max()) > tol:
        raise KeptPixelViolation(
            f"kept pixels changed by up to {float(drift.max()):.6f} (allowed {tol:.6f})"
        )
