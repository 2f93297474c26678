"""
`probe` subcommand: locality and redundancy probes plus the 2 x 3 figure.
"""

import logging
from typing import List

import numpy as np

from commands._cli_utils import print_header, print_info, print_summary
from schemas.attack import RunConfig
from schemas.report import ProbeRow
from services import report_service
from services.dataset_service import build_pairs, load_pair
from services.figure_service import probe_figure
from services.hiding.oracles import HidingScheme, make_scheme
from services.hiding.probes import damage_container, locality_probe, redundancy_probe
from utils.image_buffer import ImageBuf

logger = logging.getLogger(__name__)

PROBE_VALUE = 0.0  # one container pixel set to 0


def sample_rect(width: int, height: int, rng: np.random.Generator):
    """Random square of side min(W, H) / 4 fully inside the image."""
    side = max(1, min(width, height) // 4)
    x = int(rng.integers(0, width - side + 1))
    y = int(rng.integers(0, height - side + 1))
    return x, y, side, side


def probe_pair(scheme: HidingScheme, cover: ImageBuf, secret: ImageBuf, trials: int, seed: int) -> List[ProbeRow]:
    rng = np.random.default_rng(seed)
    rows: List[ProbeRow] = []
    for _ in range(trials):
        rect = sample_rect(cover.width, cover.height, rng)
        for mode in ("remove", "keep_only"):
            _, in_err, out_err = locality_probe(scheme, cover, secret, rect, mode)
            rows.append(ProbeRow(
                scheme=scheme.name, probe="locality", mode=mode,
                x=rect[0], y=rect[1], w=rect[2], h=rect[3],
                in_region_err=in_err, out_region_err=out_err,
            ))
        x = int(rng.integers(0, cover.width))
        y = int(rng.integers(0, cover.height))
        affected = redundancy_probe(scheme, cover, secret, (x, y), PROBE_VALUE)
        rows.append(ProbeRow(
            scheme=scheme.name, probe="redundancy", mode="set",
            x=x, y=y, value=PROBE_VALUE, affected_count=affected,
        ))
    return rows


def write_figure(cfg: RunConfig, scheme: HidingScheme, cover: ImageBuf, secret: ImageBuf, seed: int) -> None:
    rect = sample_rect(cover.width, cover.height, np.random.default_rng(seed))
    container = scheme.hide(cover, secret)
    containers = [
        container,
        damage_container(container, rect, "remove"),
        damage_container(container, rect, "keep_only"),
    ]
    reveals = [scheme.reveal(c) for c in containers]
    probe_figure(containers, reveals, cfg.output_dir / f"probe_{scheme.name}.png")


def cmd_probe(cfg: RunConfig) -> int:
    """
    Probe the first pair of the corpus with every scheme; `trials` sampled
    rects and positions each.
    """
    print_header("Vulnerability probes")
    spec = build_pairs(cfg.input_dir, cfg.pairs)[0]
    cover, secret = load_pair(spec)
    print_info("Probing", f"{spec.image_id} with {len(cfg.schemes)} scheme(s)")

    rows: List[ProbeRow] = []
    for scheme_cfg in cfg.schemes:
        scheme = make_scheme(scheme_cfg.scheme, scheme_cfg.bits, scheme_cfg.r)
        rows.extend(probe_pair(scheme, cover, secret, cfg.trials, cfg.seed))
        write_figure(cfg, scheme, cover, secret, cfg.seed)

    report_service.write_probe_rows(rows, cfg.report_path)
    return print_summary(len(cfg.schemes), len(cfg.schemes))
