"""
PEEL and PEEL-O: grid partitioning, region removal, phase scheduling and
mosaic assembly of the inpainted cells.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from core.errors import ConfigError, PhaseError
from schemas.attack import AttackConfig
from services.baseline_service import gb_attack, gn_attack, mb_attack
from services.inpaint.contract import InpaintRequest, Inpainter
from services.inpaint.edges import extract_edges
from services.inpaint.factory import make_inpainter
from services.inpaint.side_channels import make_dr, masked_copy
from utils.filters import derive_seed
from utils.image_buffer import ImageBuf, PadInfo, crop, pad_zero
from utils.masks import Center, RemovalMask, box_bounds, cell_bounds

logger = logging.getLogger(__name__)

Schedule = List[List[Center]]
AttackFn = Callable[[ImageBuf], ImageBuf]
AttackMode = Literal["peel", "peelo"]


@dataclass(frozen=True)
class RegionGrid:
    """k x k cells tiling the zero-padded canvas, row-major."""

    width: int
    height: int
    k: int
    pad: PadInfo
    cells: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return self.height // self.k

    @property
    def cols(self) -> int:
        return self.width // self.k

    @property
    def cell_count(self) -> int:
        return self.rows * self.cols

    def center(self, row: int, col: int) -> Center:
        return row * self.k + self.k // 2, col * self.k + self.k // 2

    @property
    def centers(self) -> List[Center]:
        return [self.center(r, c) for r, c in self.cells]


def grid_partition(width: int, height: int, k: int) -> RegionGrid:
    """
    Pad (width, height) up to multiples of k and enumerate the cells.

    Raises:
        ConfigError: If k < 1
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    pad_right = (-width) % k
    pad_bottom = (-height) % k
    pad = PadInfo(width, height, pad_right, pad_bottom)
    rows = pad.padded_height // k
    cols = pad.padded_width // k
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    return RegionGrid(pad.padded_width, pad.padded_height, k, pad, cells)


def removal(
    c_prime: ImageBuf,
    centers: Sequence[Center],
    k: int,
    l: int,
    allow_degenerate: bool = False,
) -> Tuple[ImageBuf, RemovalMask]:
    """
    Zero the clipped l x l box around the cell of every center.

    Args:
        c_prime: Padded container
        centers: Cell centers (m, n)
        k: Cell side
        l: Box side
        allow_degenerate: Accept l <= k (negative-control experiments only)

    Returns:
        (masked image, mask)

    Raises:
        ConfigError: If l <= k and allow_degenerate is False
    """
    if l <= k and not allow_degenerate:
        raise ConfigError(f"l must exceed k (got k={k}, l={l})")
    boxes = [box_bounds(c, k, l, c_prime.height, c_prime.width) for c in centers]
    mask = RemovalMask.from_boxes(c_prime.height, c_prime.width, boxes)
    return masked_copy(c_prime, mask), mask


def peel_schedule(grid: RegionGrid) -> Schedule:
    """One singleton phase per cell, row-major."""
    return [[grid.center(r, c)] for r, c in grid.cells]


def peelo_schedule(grid: RegionGrid, d: int, l: Optional[int] = None) -> Schedule:
    """
    (d + 1)^2 phases; phase (a, b) holds the cells with row % (d+1) == a
    and col % (d+1) == b. Phases are ordered lexicographically by (a, b).

    Raises:
        ConfigError: If d < 1, or l is given and l >= (d + 1) k
    """
    if d < 1:
        raise ConfigError(f"d must be >= 1, got {d}")
    if l is not None and l >= (d + 1) * grid.k:
        raise ConfigError(f"l={l} must be below (d+1)*k={(d + 1) * grid.k}")
    step = d + 1
    phases: Schedule = []
    for a in range(step):
        for b in range(step):
            phases.append(
                [grid.center(r, c) for r, c in grid.cells if r % step == a and c % step == b]
            )
    return phases


def coverage_map(grid: RegionGrid, schedule: Schedule) -> np.ndarray:
    """
    Phase index that writes each padded pixel into the output mosaic.

    Returns:
        int raster (height, width); -1 marks pixels no phase writes

    Raises:
        ValueError: If a cell is scheduled more than once
    """
    owner = np.full((grid.height, grid.width), -1, dtype=np.int64)
    for idx, centers in enumerate(schedule):
        for center in centers:
            y0, y1, x0, x1 = cell_bounds(center, grid.k)
            if np.any(owner[y0:y1, x0:x1] >= 0):
                raise ValueError(f"cell at {center} scheduled twice")
            owner[y0:y1, x0:x1] = idx
    return owner


def margin_mask(grid: RegionGrid, center: Center, k: int, l: int) -> np.ndarray:
    """Pixels within Chebyshev distance (l - k) / 2 of the cell, clipped to the canvas."""
    y0, y1, x0, x1 = cell_bounds(center, k)
    m = (l - k) // 2
    out = np.zeros((grid.height, grid.width), dtype=bool)
    out[max(y0 - m, 0) : min(y1 + m, grid.height), max(x0 - m, 0) : min(x1 + m, grid.width)] = True
    return out


def build_schedule(grid: RegionGrid, cfg: AttackConfig, mode: AttackMode, allow_degenerate: bool = False) -> Schedule:
    if mode == "peel":
        return peel_schedule(grid)
    if mode == "peelo":
        return peelo_schedule(grid, cfg.d, None if allow_degenerate else cfg.l)
    raise ConfigError(f"unknown removal mode {mode!r}")


def run_attack(
    c_prime: ImageBuf,
    cfg: AttackConfig,
    mode: AttackMode,
    inpainter: Inpainter,
    allow_degenerate: bool = False,
) -> ImageBuf:
    """
    Remove, inpaint and re-assemble every cell of the container.

    Each phase masks the ORIGINAL padded container, so repaired content
    never feeds a later phase. Only the k x k cell interiors of a phase
    are copied from its inpainted result into the output.

    Args:
        c_prime: Container image
        cfg: Attack hyperparameters
        mode: 'peel' (one cell per phase) or 'peelo' ((d+1)^2 phases)
        inpainter: Inpainter callable
        allow_degenerate: Skip the l > k and l < (d+1)k checks

    Returns:
        Attacked container, same size as c_prime

    Raises:
        ConfigError: On invalid geometry
        PhaseError: If the inpainter fails; carries the phase index
    """
    if not allow_degenerate and cfg.l <= cfg.k:
        raise ConfigError(f"l must exceed k (got k={cfg.k}, l={cfg.l})")
    padded, pad = pad_zero(c_prime, cfg.k)
    grid = grid_partition(c_prime.width, c_prime.height, cfg.k)
    schedule = build_schedule(grid, cfg, mode, allow_degenerate)

    edge = None
    if cfg.use_edge:
        edge = extract_edges(padded, cfg.canny_sigma, cfg.canny_lo, cfg.canny_hi)

    mosaic = np.zeros_like(padded.data)
    for idx, centers in enumerate(schedule):
        if not centers:
            continue
        masked, mask = removal(padded, centers, cfg.k, cfg.l, allow_degenerate)
        dr = make_dr(padded, mask, cfg.delta, derive_seed(cfg.seed, idx)) if cfg.use_dr else None
        req = InpaintRequest(masked, mask, edge=edge, dr=dr)
        try:
            repaired = inpainter(req)
        except Exception as e:
            raise PhaseError(idx, e) from e
        for center in centers:
            y0, y1, x0, x1 = cell_bounds(center, cfg.k)
            mosaic[y0:y1, x0:x1] = repaired.data[y0:y1, x0:x1]

    logger.debug(f"{mode} finished {len(schedule)} phases over {grid.cell_count} cells")
    return crop(ImageBuf(mosaic), pad)


def make_attack(attack_id: str, cfg: AttackConfig, inpainter: Optional[Inpainter] = None) -> AttackFn:
    """
    Resolve an attack id into a c' -> attacked c' callable.

    Raises:
        ConfigError: If the id is unknown
    """
    if attack_id in ("peel", "peelo"):
        if attack_id == "peelo":
            cfg.require_sparse_phases()
        chosen = inpainter or make_inpainter(cfg)
        mode: AttackMode = attack_id  # type: ignore[assignment]
        return lambda img: run_attack(img, cfg, mode, chosen)

    attacks: Dict[str, AttackFn] = {
        "none": lambda img: img,
        "gn": lambda img: gn_attack(img, cfg.delta, cfg.seed),
        "gb": gb_attack,
        "mb": mb_attack,
    }
    try:
        return attacks[attack_id]
    except KeyError:
        raise ConfigError(f"unknown attack {attack_id!r}")
