"""
Vulnerability probes for the oracle schemes: locality (remove or keep a
region), low redundancy (change one pixel) and removal leakage (which
secret bits an inpainter could still see during an attack phase).
"""

import logging
from dataclasses import dataclass
from typing import Literal, Sequence, Tuple, Union

import numpy as np

from core.errors import ConfigError
from schemas.attack import AttackConfig
from services.hiding.oracles import HidingScheme
from services.removal_service import build_schedule, grid_partition, removal
from utils.image_buffer import ImageBuf, crop, pad_zero, require_same_shape
from utils.masks import cell_bounds

logger = logging.getLogger(__name__)

Rect = Tuple[int, int, int, int]  # x, y, w, h
ProbeMode = Literal["remove", "keep_only"]


def _check_rect(img: ImageBuf, rect: Rect) -> None:
    x, y, w, h = rect
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > img.width or y + h > img.height:
        raise ConfigError(f"rect {rect} is outside the {img.width}x{img.height} image")


def damage_container(c_prime: ImageBuf, rect: Rect, mode: ProbeMode) -> ImageBuf:
    """Zero rect ('remove') or everything but rect ('keep_only')."""
    _check_rect(c_prime, rect)
    x, y, w, h = rect
    inside = np.zeros((c_prime.height, c_prime.width), dtype=bool)
    inside[y : y + h, x : x + w] = True
    if mode == "remove":
        keep = ~inside
    elif mode == "keep_only":
        keep = inside
    else:
        raise ConfigError(f"unknown probe mode {mode!r}")
    return ImageBuf(np.where(keep[:, :, None], c_prime.data, 0.0))


def footprint(height: int, width: int, rect: Rect, r: int, mode: ProbeMode) -> np.ndarray:
    """
    Secret-space footprint of rect for a scheme of locality radius r.

    remove: rect dilated by r (every secret pixel the hole can reach).
    keep_only: rect eroded by r (every secret pixel stored wholly inside it).
    """
    x, y, w, h = rect
    out = np.zeros((height, width), dtype=bool)
    if mode == "remove":
        out[max(y - r, 0) : min(y + h + r, height), max(x - r, 0) : min(x + w + r, width)] = True
    elif w > 2 * r and h > 2 * r:
        out[y + r : y + h - r, x + r : x + w - r] = True
    return out


def _mean_abs(diff: np.ndarray, region: np.ndarray) -> float:
    if not region.any():
        return 0.0
    return float(diff[region].mean())


def locality_probe(
    scheme: HidingScheme,
    c: ImageBuf,
    s: ImageBuf,
    rect: Rect,
    mode: ProbeMode,
) -> Tuple[ImageBuf, float, float]:
    """
    Damage a region of the container and see where the reveal breaks.

    Errors are mean absolute differences against the clean reveal, split
    by the footprint of rect (see `footprint`). With 'remove' the damage
    sits inside the footprint; with 'keep_only' it sits outside.

    Returns:
        (damaged reveal, in-footprint error, out-of-footprint error)

    Raises:
        ConfigError: If rect leaves the image
    """
    require_same_shape(c, s, "cover and secret")
    c_prime = scheme.hide(c, s)
    clean = scheme.reveal(c_prime)
    damaged = scheme.reveal(damage_container(c_prime, rect, mode))
    region = footprint(c.height, c.width, rect, scheme.locality_radius, mode)
    diff = np.abs(damaged.data - clean.data).mean(axis=2)
    return damaged, _mean_abs(diff, region), _mean_abs(diff, ~region)


def redundancy_probe(
    scheme: HidingScheme,
    c: ImageBuf,
    s: ImageBuf,
    pos: Tuple[int, int],
    v: Union[float, Sequence[float]],
    tau: float = 0.0,
) -> int:
    """
    Overwrite one container pixel with v and count revealed pixels whose
    value moved by more than tau in any channel.

    Args:
        pos: (x, y) container position
        v: New value, scalar or one value per channel
    """
    x, y = pos
    if not (0 <= x < c.width and 0 <= y < c.height):
        raise ConfigError(f"position {pos} is outside the {c.width}x{c.height} image")
    c_prime = scheme.hide(c, s)
    clean = scheme.reveal(c_prime)
    data = c_prime.copy_data()
    data[y, x, :] = v
    changed = scheme.reveal(ImageBuf(data))
    moved = np.abs(changed.data - clean.data).max(axis=2) > tau
    return int(np.count_nonzero(moved))


@dataclass(frozen=True)
class LeakageReport:
    """
    surviving_slots: secret bits whose container slot was still present in
        the inpainter's input when their cell was repaired
    agreement: fraction of secret bits read correctly from those inputs
    """

    surviving_slots: int
    total_bits: int
    agreement: float


def removal_leakage(
    scheme: HidingScheme,
    c: ImageBuf,
    s: ImageBuf,
    cfg: AttackConfig,
    mode: Literal["peel", "peelo"] = "peel",
) -> LeakageReport:
    """
    Measure what an attack phase leaves of each processed cell's secret.

    For every phase, the masked container handed to the inpainter is
    revealed and compared with the secret on that phase's cells. Margins
    of at least the locality radius leave no surviving slot, so agreement
    falls to the rate of zero bits in the secret; thinner margins let
    boundary bits through.

    l == k is accepted here so the margin can be switched off.
    """
    require_same_shape(c, s, "cover and secret")
    c_prime = scheme.hide(c, s)
    truth = s.to_bytes()
    padded, pad = pad_zero(c_prime, cfg.k)
    grid = grid_partition(c.width, c.height, cfg.k)
    schedule = build_schedule(grid, cfg, mode, allow_degenerate=True)
    slot_maps = scheme.slot_maps(c.height, c.width)

    surviving = 0
    agree = 0
    total = 0
    for centers in schedule:
        if not centers:
            continue
        masked, mask = removal(padded, centers, cfg.k, cfg.l, allow_degenerate=True)
        seen = scheme.reveal(crop(masked, pad)).to_bytes()
        keep = mask.keep[: c.height, : c.width]
        for center in centers:
            y0, y1, x0, x1 = cell_bounds(center, cfg.k)
            y1, x1 = min(y1, c.height), min(x1, c.width)
            if y0 >= y1 or x0 >= x1:
                continue
            for j, (ymap, xmap) in enumerate(slot_maps):
                shift = 7 - j
                alive = keep[ymap[y0:y1][:, None], xmap[x0:x1][None, :]]
                surviving += int(np.count_nonzero(alive)) * c.channels
                true_bit = (truth[y0:y1, x0:x1] >> shift) & 1
                seen_bit = (seen[y0:y1, x0:x1] >> shift) & 1
                agree += int(np.count_nonzero(true_bit == seen_bit))
                total += true_bit.size

    agreement = agree / total if total else 0.0
    logger.debug(f"leakage k={cfg.k} l={cfg.l}: {surviving} surviving slots, agreement {agreement:.4f}")
    return LeakageReport(surviving, total, agreement)
