"""
`inpaint-eval` subcommand: gamma_hat of the configured inpainter and the
epsilon it implies for the corpus grid.
"""

import logging
from typing import List

import pandas as pd

from commands._cli_utils import print_fail, print_header, print_pass, print_summary, print_table
from core.errors import EmptyCorpusError
from schemas.attack import RunConfig
from services.dataset_service import list_images
from services.inpaint.factory import make_inpainter
from services.inpaint.gamma import estimate_gamma
from services.removal_service import grid_partition
from services.theory_service import epsilon_bound
from utils.image_buffer import ImageBuf, load_image

logger = logging.getLogger(__name__)

REMOVAL_ATTACKS = ("peel", "peelo")


def load_images(cfg: RunConfig) -> List[ImageBuf]:
    images = []
    for path in list_images(cfg.input_dir):
        try:
            images.append(load_image(path))
        except Exception as e:
            logger.error(f"skipping {path.name}: {e}")
    if not images:
        raise EmptyCorpusError(f"no readable PNG images in {cfg.input_dir}")
    return images


def cmd_inpaint_eval(cfg: RunConfig) -> int:
    print_header("Inpainter evaluation")
    corpus = load_images(cfg)
    attacks = [a for a in cfg.attacks if a in REMOVAL_ATTACKS] or ["peel"]

    records = []
    for attack_id in attacks:
        acfg = cfg.attack_config(attack_id)
        try:
            gamma_hat = estimate_gamma(
                make_inpainter(acfg), corpus, acfg.l, cfg.trials, seed=acfg.seed,
                use_edge=acfg.use_edge, use_dr=acfg.use_dr, delta=acfg.delta,
            )
        except Exception as e:
            print_fail(attack_id, str(e))
            continue
        grid = grid_partition(corpus[0].width, corpus[0].height, acfg.k)
        bound = epsilon_bound(gamma_hat, grid.width, acfg.k, grid.height) if grid.cell_count > 1 else float("inf")
        records.append({
            "attack": attack_id,
            "inpainter": acfg.inpainter,
            "k": acfg.k,
            "l": acfg.l,
            "K": grid.width,
            "K_h": grid.height,
            "trials": cfg.trials,
            "gamma_hat": gamma_hat,
            "epsilon_bound": bound,
        })
        print_pass(attack_id, f"gamma_hat={gamma_hat:.6f}, implied epsilon={bound:.6f}")

    df = pd.DataFrame(records)
    cfg.report_path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(cfg.report_path, index=False, lineterminator="\n")
    if not df.empty:
        print_table("Inpainter gamma", df.to_string(index=False))
    return print_summary(len(records), len(attacks))
