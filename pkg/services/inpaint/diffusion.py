"""
Harmonic (diffusion) inpainting.

Hole pixels solve the discrete Laplace equation with kept pixels as
Dirichlet boundary. Each connected hole is solved in its own bounding
window, so the removal boxes of one phase are independent.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from core import settings
from core.errors import ConfigError
from services.inpaint.contract import InpaintRequest, InpaintResult
from utils.image_buffer import ImageBuf

logger = logging.getLogger(__name__)

NEIGHBORS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _shift(arr: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """out[y, x] = arr[y + dy, x + dx], zero where that falls outside."""
    out = np.zeros_like(arr)
    h, w = arr.shape[:2]
    dst_y = slice(max(0, -dy), h - max(0, dy))
    dst_x = slice(max(0, -dx), w - max(0, dx))
    src_y = slice(max(0, dy), h - max(0, -dy))
    src_x = slice(max(0, dx), w - max(0, -dx))
    out[dst_y, dst_x] = arr[src_y, src_x]
    return out


def _neighbor_weights(shape: Tuple[int, int], edge: Optional[np.ndarray]) -> List[np.ndarray]:
    """Normalized 4-neighbor weights; no coupling across edge/non-edge boundaries."""
    inside = np.ones(shape, dtype=np.float64)
    raw = []
    for dy, dx in NEIGHBORS:
        w = _shift(inside, dy, dx)
        if edge is not None:
            same_side = edge == _shift(edge, dy, dx)
            w = w * same_side
        raw.append(w)
    total = sum(raw)
    isolated = total == 0
    if np.any(isolated):
        fallback = [_shift(inside, dy, dx) for dy, dx in NEIGHBORS]
        raw = [np.where(isolated, f, w) for w, f in zip(raw, fallback)]
        total = sum(raw)
    return [w / np.maximum(total, 1.0) for w in raw]


def _average(u: np.ndarray, weights: List[np.ndarray]) -> np.ndarray:
    acc = np.zeros_like(u)
    for (dy, dx), w in zip(NEIGHBORS, weights):
        acc += w[:, :, None] * _shift(u, dy, dx)
    return acc


def _solve_window(
    u: np.ndarray,
    hole: np.ndarray,
    weights: List[np.ndarray],
    max_iters: int,
    tol: float,
    method: str,
) -> Tuple[bool, int]:
    """Iterate in place on u until the largest hole update drops below tol."""
    if method == "jacobi":
        for it in range(1, max_iters + 1):
            new = _average(u, weights)
            step = float(np.max(np.abs(new[hole] - u[hole])))
            u[hole] = new[hole]
            if step < tol:
                return True, it
        return False, max_iters

    n = max(u.shape[0], u.shape[1])
    omega = 2.0 / (1.0 + math.sin(math.pi / (n + 1)))
    yy, xx = np.indices(hole.shape)
    red = hole & ((yy + xx) % 2 == 0)
    black = hole & ~red
    for it in range(1, max_iters + 1):
        step = 0.0
        for color in (red, black):
            if not color.any():
                continue
            new = _average(u, weights)
            delta = omega * (new[color] - u[color])
            u[color] += delta
            step = max(step, float(np.max(np.abs(delta))))
        if step < tol:
            return True, it
    return False, max_iters


def diffusion_inpaint(
    req: InpaintRequest,
    max_iters: Optional[int] = None,
    tol: float = settings.DIFFUSION_TOL,
    method: str = settings.DIFFUSION_METHOD,
    dr_blend: float = settings.DR_BLEND,
) -> InpaintResult:
    """
    Fill holes with the harmonic extension of the kept pixels.

    With `req.edge`, averaging never couples an edge pixel to a non-edge
    pixel. With `req.dr`, the solve starts from dr and the hole result is
    (1 - dr_blend) * harmonic + dr_blend * dr.

    Args:
        req: Inpainting request
        max_iters: Iteration cap per hole; defaults to 10 * side^2 of the
            largest hole window
        tol: Stop once the largest per-pixel update is below this
        method: 'jacobi' or 'sor' (red-black over-relaxation)
        dr_blend: Weight of dr in the final hole values

    Returns:
        InpaintResult; converged is False if any hole hit max_iters
    """
    if method not in ("jacobi", "sor"):
        raise ConfigError(f"unknown diffusion method {method!r}")
    holes = req.mask.holes
    if not holes.any():
        return InpaintResult(req.masked, True, 0)

    out = req.masked.copy_data()
    dr = req.dr.data if req.dr is not None else None
    labels, count = ndimage.label(holes)
    slices = ndimage.find_objects(labels)
    height, width = holes.shape

    converged = True
    iterations = 0
    for idx, (sy, sx) in enumerate(slices, start=1):
        y0, y1 = max(sy.start - 1, 0), min(sy.stop + 1, height)
        x0, x1 = max(sx.start - 1, 0), min(sx.stop + 1, width)
        win = (slice(y0, y1), slice(x0, x1))
        lab = labels[win]
        hole = lab == idx
        u = out[win].copy()

        ring = ndimage.binary_dilation(hole) & ~hole & (lab == 0)
        if dr is not None:
            u[hole] = dr[win][hole]
        elif ring.any():
            u[hole] = u[ring].mean(axis=0)
        else:
            logger.warning(f"hole {idx} has no kept neighbors; filling with zeros")

        cap = max_iters
        if cap is None:
            side = max(y1 - y0, x1 - x0)
            cap = settings.DIFFUSION_ITER_FACTOR * side * side
        edge = req.edge[win] if req.edge is not None else None
        weights = _neighbor_weights(hole.shape, edge)
        ok, its = _solve_window(u, hole, weights, cap, tol, method)
        converged &= ok
        iterations = max(iterations, its)

        if dr is not None:
            u[hole] = (1.0 - dr_blend) * u[hole] + dr_blend * dr[win][hole]
        view = out[win]
        view[hole] = u[hole]

    logger.debug(f"diffusion filled {count} holes, max {iterations} iterations, converged={converged}")
    return InpaintResult(ImageBuf(np.clip(out, 0.0, 1.0)), converged, iterations)


class DiffusionInpainter:
    """Callable wrapper that logs non-convergence and returns the image."""

    name = "diffusion"

    def __init__(
        self,
        max_iters: Optional[int] = None,
        tol: float = settings.DIFFUSION_TOL,
        method: str = settings.DIFFUSION_METHOD,
        dr_blend: float = settings.DR_BLEND,
    ):
        self.max_iters = max_iters
        self.tol = tol
        self.method = method
        self.dr_blend = dr_blend

    def __call__(self, req: InpaintRequest) -> ImageBuf:
        result = diffusion_inpaint(req, self.max_iters, self.tol, self.method, self.dr_blend)
        if not result.converged:
            logger.warning(
                f"diffusion did not reach tol={self.tol} within {result.iterations} iterations"
            )
        return result.image
