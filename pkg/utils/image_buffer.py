"""
Image buffer type and PNG IO.
Every pixel carried through the toolkit lives in an ImageBuf with values in [0, 1].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import filetype
import numpy as np
from PIL import Image, UnidentifiedImageError

from core.errors import DimensionMismatchError, ImageFormatError, ImageIOError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Pillow modes we accept: 8-bit grayscale and 8-bit RGB
SUPPORTED_MODES = {"L": 1, "RGB": 3}


@dataclass(frozen=True, eq=False)
class ImageBuf:
    """
    Normalized raster image.

    `data` is a read-only float64 array of shape (height, width, channels),
    i.e. row-major and channel-interleaved, with every value in [0, 1].
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValueError(f"ImageBuf expects a 2-D or 3-D array, got shape {arr.shape}")
        h, w, c = arr.shape
        if h < 1 or w < 1:
            raise ValueError(f"ImageBuf needs positive dimensions, got {w}x{h}")
        if c not in (1, 3):
            raise ValueError(f"ImageBuf supports 1 or 3 channels, got {c}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ImageBuf values must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError(
                f"ImageBuf values must lie in [0, 1], got [{arr.min()}, {arr.max()}]"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape

    @classmethod
    def from_bytes(cls, raw: np.ndarray) -> "ImageBuf":
        """Build an ImageBuf from 8-bit values (v / 255)."""
        return cls(np.asarray(raw, dtype=np.float64) / 255.0)

    def to_bytes(self) -> np.ndarray:
        """Quantize to uint8 with round-half-up: round(v * 255)."""
        return quantize_bytes(self.data)

    def copy_data(self) -> np.ndarray:
        """Writable copy of the pixel array."""
        return self.data.copy()

    def gray(self) -> np.ndarray:
        """Channel mean as a 2-D array."""
        return self.data.mean(axis=2)


@dataclass(frozen=True)
class PadInfo:
    """Bookkeeping for right/bottom zero padding."""

    original_width: int
    original_height: int
    pad_right: int
    pad_bottom: int

    @property
    def padded_width(self) -> int:
        return self.original_width + self.pad_right

    @property
    def padded_height(self) -> int:
        return self.original_height + self.pad_bottom


def quantize_bytes(values: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to uint8 via floor(v * 255 + 0.5)."""
    scaled = np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5)
    return scaled.astype(np.uint8)


def require_same_shape(a: ImageBuf, b: ImageBuf, what: str = "images") -> None:
    """
    Raise DimensionMismatchError unless both buffers share shape.

    Args:
        a: First image
        b: Second image
        what: Label used in the error message
    """
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"{what} differ in shape: {a.width}x{a.height}x{a.channels} "
            f"vs {b.width}x{b.height}x{b.channels}"
        )


def load_image(path: PathLike) -> ImageBuf:
    """
    Read an 8-bit grayscale or RGB PNG into an ImageBuf.

    Args:
        path: PNG file path

    Returns:
        ImageBuf with values v_8bit / 255, channels preserved

    Raises:
        ImageIOError: If the file cannot be read
        ImageFormatError: If the file is not a PNG or has an unsupported mode
    """
    path = Path(path)
    try:
        head = path.read_bytes()[:262]
    except OSError as e:
        raise ImageIOError(f"cannot read {path}: {e}") from e

    kind = filetype.guess(head)
    if kind is None or kind.mime != "image/png":
        raise ImageFormatError(f"{path} is not a PNG file")

    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode not in SUPPORTED_MODES:
                raise ImageFormatError(
                    f"{path}: unsupported PNG mode {mode!r}; expected 8-bit L or RGB"
                )
            raw = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as e:
        raise ImageFormatError(f"{path}: {e}") from e
    except OSError as e:
        raise ImageIOError(f"cannot decode {path}: {e}") from e

    logger.debug(f"Loaded {path} ({raw.shape})")
    return ImageBuf.from_bytes(raw)


def save_image(img: ImageBuf, path: PathLike) -> None:
    """
    Write an ImageBuf as an 8-bit PNG with v_8bit = round(v * 255).

    Args:
        img: Image to write
        path: Destination path (parent directory must exist)

    Raises:
        ImageIOError: If the path is not writable
    """
    raw = img.to_bytes()
    if img.channels == 1:
        pil = Image.fromarray(raw[:, :, 0])
    else:
        pil = Image.fromarray(raw)
    try:
        pil.save(Path(path), format="PNG")
    except OSError as e:
        raise ImageIOError(f"cannot write {path}: {e}") from e


def pad_zero(img: ImageBuf, k: int) -> Tuple[ImageBuf, PadInfo]:
    """
    Pad right and bottom with zeros up to the next multiples of k.

    Args:
        img: Source image
        k: Grid cell side

    Returns:
        (padded image, PadInfo)
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    pad_right = (-img.width) % k
    pad_bottom = (-img.height) % k
    info = PadInfo(img.width, img.height, pad_right, pad_bottom)
    if pad_right == 0 and pad_bottom == 0:
        return img, info
    padded = np.pad(img.data, ((0, pad_bottom), (0, pad_right), (0, 0)), mode="constant")
    return ImageBuf(padded), info


def crop(img: ImageBuf, pad: PadInfo) -> ImageBuf:
    """
    Undo pad_zero by keeping the original top-left sub-image.

    Raises:
        DimensionMismatchError: If pad does not describe img
    """
    if img.width != pad.padded_width or img.height != pad.padded_height:
        raise DimensionMismatchError(
            f"PadInfo expects a {pad.padded_width}x{pad.padded_height} buffer, "
            f"got {img.width}x{img.height}"
        )
    if pad.pad_right == 0 and pad.pad_bottom == 0:
        return img
    return ImageBuf(img.data[: pad.original_height, : pad.original_width, :])
