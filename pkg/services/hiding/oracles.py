"""
Oracle hiding schemes.

Both schemes are exactly invertible and provably local, which makes the
removal guarantee testable without trained hiding networks:

- LSB: secret pixel (i, j) lives in the low bits of container pixel (i, j).
- Spread: each of the secret pixel's bits lives in a different container
  pixel at Chebyshev distance <= r.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from core.errors import ConfigError
from utils.image_buffer import ImageBuf, require_same_shape

logger = logging.getLogger(__name__)

AxisMap = np.ndarray
SlotMap = Tuple[AxisMap, AxisMap]


def quantize_bits(img: ImageBuf, bits: int) -> ImageBuf:
    """Keep only the top `bits` bits of every 8-bit value."""
    raw = img.to_bytes()
    keep = np.uint8((0xFF << (8 - bits)) & 0xFF)
    return ImageBuf.from_bytes(raw & keep)


def secret_bit_agreement(true_secret: ImageBuf, revealed: ImageBuf, bits: int) -> float:
    """
    Fraction of the top `bits` bit-planes on which two images agree.

    Args:
        true_secret: Reference secret
        revealed: Revealed image
        bits: Number of top bit-planes compared

    Returns:
        Agreement in [0, 1]; 0.5 is chance for uniformly random secrets
    """
    require_same_shape(true_secret, revealed, "secret and revealed image")
    a = true_secret.to_bytes()
    b = revealed.to_bytes()
    agree = 0
    for j in range(bits):
        shift = 7 - j
        agree += int(np.count_nonzero(((a >> shift) & 1) == ((b >> shift) & 1)))
    return agree / float(a.size * bits)


class HidingScheme(ABC):
    """
    Hide/reveal pair with a declared locality radius.

    Subclasses must satisfy reveal(hide(c, s)) == quantize_bits(s, bits)
    bit-for-bit, and changing container pixels farther than
    `locality_radius` from (i, j) must never change revealed pixel (i, j).
    """

    name: str = "scheme"

    def __init__(self, bits: int, locality_radius: int):
        if not 1 <= bits <= 8:
            raise ConfigError(f"bits must be in [1, 8], got {bits}")
        self.bits = bits
        self.locality_radius = locality_radius

    @property
    def bits_or_r(self) -> int:
        return self.bits

    @abstractmethod
    def slot_maps(self, height: int, width: int) -> List[SlotMap]:
        """Per secret bit j (MSB first): row and column index maps to the container slot."""

    def hide(self, c: ImageBuf, s: ImageBuf) -> ImageBuf:
        """
        Embed the top `bits` bits of s into the low `bits` bits of c.

        Raises:
            DimensionMismatchError: If c and s differ in shape
        """
        require_same_shape(c, s, "cover and secret")
        cover = c.to_bytes()
        secret = s.to_bytes()
        low_mask = np.uint8((1 << self.bits) - 1)
        out = cover & np.uint8(~low_mask & 0xFF)
        for j, (ymap, xmap) in enumerate(self.slot_maps(c.height, c.width)):
            bit = (secret >> (7 - j)) & 1
            plane = np.zeros_like(bit)
            plane[ymap[:, None], xmap[None, :], :] = bit
            out |= (plane << (self.bits - 1 - j)).astype(np.uint8)
        return ImageBuf.from_bytes(out)

    def reveal(self, c_prime: ImageBuf) -> ImageBuf:
        """Read the secret bits back from the low bit-planes."""
        cont = c_prime.to_bytes()
        out = np.zeros_like(cont)
        for j, (ymap, xmap) in enumerate(self.slot_maps(c_prime.height, c_prime.width)):
            plane = (cont >> (self.bits - 1 - j)) & 1
            bit = plane[ymap[:, None], xmap[None, :], :]
            out |= (bit << (7 - j)).astype(np.uint8)
        return ImageBuf.from_bytes(out)

    def describe(self) -> str:
        return f"{self.name}(bits={self.bits}, r={self.locality_radius})"


class LsbScheme(HidingScheme):
    """Per-pixel low-bit replacement, locality radius 0."""

    name = "lsb"

    def __init__(self, bits: int = 4):
        if not 1 <= bits <= 4:
            raise ConfigError(f"lsb supports bits in [1, 4], got {bits}")
        super().__init__(bits, 0)

    def slot_maps(self, height: int, width: int) -> List[SlotMap]:
        ys, xs = np.arange(height), np.arange(width)
        return [(ys, xs)] * self.bits

    def hide(self, c: ImageBuf, s: ImageBuf) -> ImageBuf:
        require_same_shape(c, s, "cover and secret")
        cover = c.to_bytes()
        secret = s.to_bytes()
        low_mask = (1 << self.bits) - 1
        out = (cover & np.uint8(~low_mask & 0xFF)) | (secret >> (8 - self.bits))
        return ImageBuf.from_bytes(out)

    def reveal(self, c_prime: ImageBuf) -> ImageBuf:
        cont = c_prime.to_bytes()
        low_mask = np.uint8((1 << self.bits) - 1)
        return ImageBuf.from_bytes(((cont & low_mask) << (8 - self.bits)).astype(np.uint8))


@lru_cache(maxsize=256)
def swap_map(n: int, t: int, align: int) -> AxisMap:
    """
    Involution on range(n) moving each index by exactly t inside blocks of 2t.

    Blocks start at `align` (mod 2t); indices before the first block and
    indices whose partner would leave [0, n) stay in place.
    """
    idx = np.arange(n)
    if t == 0:
        return idx
    out = idx.copy()
    rel = idx - align
    valid = rel >= 0
    first_half = valid & ((rel % (2 * t)) < t)
    second_half = valid & ~first_half
    up = idx + t
    ok = first_half & (up < n)
    out[ok] = up[ok]
    down = idx - t
    ok = second_half & (down >= 0) & ((down - align) >= 0)
    out[ok] = down[ok]
    out.setflags(write=False)
    return out


def axis_variants(r: int) -> List[Tuple[int, int]]:
    """(t, align) pairs giving 2r + 1 per-axis maps with distinct interior displacements."""
    variants = [(0, 0)]
    for t in range(1, r + 1):
        variants.append((t, 0))
        variants.append((t, t))
    return variants


class SpreadScheme(HidingScheme):
    """
    Neighborhood-spread embedding with locality radius r.

    Secret bit j of pixel p is written into container bit-plane
    (bits - 1 - j) at sigma_j(p), where sigma_j is a product of per-axis
    swap involutions. The offset table is fixed: farthest slots first.
    """

    name = "spread"

    def __init__(self, r: int = 1, bits: int = 4):
        if r < 1:
            raise ConfigError(f"spread needs r >= 1, got {r}")
        if (2 * r + 1) ** 2 < bits:
            raise ConfigError(f"spread r={r} has only {(2 * r + 1) ** 2} slots for bits={bits}")
        if bits > 4:
            logger.warning(f"spread with bits={bits} overwrites more than the low nibble")
        super().__init__(bits, r)
        self.r = r
        variants = axis_variants(r)
        slots = [(vy, vx) for vy in variants for vx in variants]
        slots.sort(key=lambda s: (-max(s[0][0], s[1][0]), -min(s[0][0], s[1][0]), s))
        self.offset_table = slots[:bits]

    @property
    def bits_or_r(self) -> int:
        return self.r

    def slot_maps(self, height: int, width: int) -> List[SlotMap]:
        return [
            (swap_map(height, ty, ay), swap_map(width, tx, ax))
            for (ty, ay), (tx, ax) in self.offset_table
        ]


def lsb_hide(c: ImageBuf, s: ImageBuf, bits: int) -> ImageBuf:
    return LsbScheme(bits).hide(c, s)


def lsb_reveal(c_prime: ImageBuf, bits: int) -> ImageBuf:
    return LsbScheme(bits).reveal(c_prime)


def spread_hide(c: ImageBuf, s: ImageBuf, r: int, bits: int) -> ImageBuf:
    return SpreadScheme(r, bits).hide(c, s)


def spread_reveal(c_prime: ImageBuf, r: int, bits: int) -> ImageBuf:
    return SpreadScheme(r, bits).reveal(c_prime)


def make_scheme(scheme: str, bits: int = 4, r: int = 1) -> HidingScheme:
    """
    Build an oracle scheme by id.

    Raises:
        ConfigError: If the id is unknown
    """
    if scheme == "lsb":
        return LsbScheme(bits)
    if scheme == "spread":
        return SpreadScheme(r, bits)
    raise ConfigError(f"unknown hiding scheme {scheme!r}")
