"""
Subprocess adapter for an out-of-process inpainter.

File protocol inside a fresh temporary directory:
    masked.png  8-bit container with holes zeroed
    mask.png    8-bit, 0 = hole, 255 = keep
    edge.png    optional, 0 / 255
    dr.png      optional, 8-bit distorted hole content
The tool is invoked as `<cmd> <dir>` and must write result.png with the
same dimensions and channels as masked.png.
"""

import logging
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import List, Optional

import numpy as np

from core.errors import (
    ExternalProcessError,
    ExternalProtocolError,
    ImageFormatError,
    ImageIOError,
)
from services.inpaint.contract import InpaintRequest, check_kept_pixels
from utils.image_buffer import ImageBuf, load_image, save_image

logger = logging.getLogger(__name__)

# Kept pixels survive one 8-bit round trip
KEPT_TOLERANCE = 1.0 / 255.0 + 1e-9


def _command(cmd: str, workdir: Path) -> List[str]:
    argv = shlex.split(cmd)
    if not argv:
        raise ExternalProcessError("external inpainter command is empty")
    return argv + [str(workdir)]


def write_request(req: InpaintRequest, workdir: Path) -> None:
    """Serialize a request into the protocol files."""
    save_image(req.masked, workdir / "masked.png")
    save_image(req.mask.to_image(), workdir / "mask.png")
    if req.edge is not None:
        save_image(ImageBuf(req.edge.astype(np.float64)), workdir / "edge.png")
    if req.dr is not None:
        save_image(req.dr, workdir / "dr.png")


def read_result(req: InpaintRequest, workdir: Path) -> ImageBuf:
    """
    Load and validate result.png.

    Raises:
        ExternalProtocolError: If result.png is missing, unreadable or mis-sized
        KeptPixelViolation: If kept pixels moved by more than one 8-bit step
    """
    path = workdir / "result.png"
    if not path.is_file():
        raise ExternalProtocolError(f"external inpainter wrote no result.png in {workdir}")
    try:
        out = load_image(path)
    except (ImageFormatError, ImageIOError) as e:
        raise ExternalProtocolError(f"unreadable result.png: {e}") from e
    if out.shape != req.masked.shape:
        raise ExternalProtocolError(
            f"result.png is {out.width}x{out.height}x{out.channels}, "
            f"expected {req.masked.width}x{req.masked.height}x{req.masked.channels}"
        )
    check_kept_pixels(req, out, KEPT_TOLERANCE)
    return out


def external_inpaint(cmd: str, req: InpaintRequest, timeout: Optional[float] = None) -> ImageBuf:
    """
    Run an external inpainter through the file protocol.

    Args:
        cmd: Command line; the working directory is appended as last argument
        req: Inpainting request
        timeout: Optional wall-clock limit in seconds

    Returns:
        Validated result image

    Raises:
        ExternalProcessError: If the tool cannot start, times out or exits non-zero
        ExternalProtocolError: If result.png is missing or mis-sized
        KeptPixelViolation: If the tool changed kept pixels
    """
    with tempfile.TemporaryDirectory(prefix="peel-inpaint-") as tmp:
        workdir = Path(tmp)
        write_request(req, workdir)
        argv = _command(cmd, workdir)
        logger.debug(f"running external inpainter: {argv}")
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as e:
            raise ExternalProcessError(f"cannot start {argv[0]!r}: {e}") from e
        except subprocess.TimeoutExpired as e:
            raise ExternalProcessError(f"external inpainter timed out after {timeout}s") from e

        if proc.stderr.strip():
            logger.warning(f"external inpainter stderr: {proc.stderr.strip()[:500]}")
        if proc.returncode != 0:
            raise ExternalProcessError(
                f"external inpainter exited with status {proc.returncode}"
            )
        return read_result(req, workdir)


class ExternalInpainter:
    name = "external"

    def __init__(self, cmd: str, timeout: Optional[float] = None):
        self.cmd = cmd
        self.timeout = timeout

    def __call__(self, req: InpaintRequest) -> ImageBuf:
        return external_inpaint(self.cmd, req, self.timeout)
