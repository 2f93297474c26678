"""
`attack` subcommand: hide, attack, reveal and score every cover/secret pair.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from app_logging.run_log import log_image_event
from commands._cli_utils import (
    EXIT_OK,
    ordered_map,
    print_header,
    print_info,
    print_summary,
    print_table,
)
from schemas.attack import AttackConfig, RunConfig, SchemeConfig
from schemas.report import CsvRow
from services import report_service
from services.dataset_service import PairSpec, build_pairs, load_pair
from services.figure_service import attack_figure
from services.hiding.oracles import make_scheme
from services.metrics_service import report_pair
from services.removal_service import make_attack
from utils.image_buffer import save_image

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttackJob:
    spec: PairSpec
    scheme: SchemeConfig
    attack_id: str
    cfg: AttackConfig
    out_dir: Path
    figure_path: Optional[Path] = None


@dataclass(frozen=True)
class JobResult:
    image_id: str
    row: Optional[CsvRow] = None
    error: Optional[str] = None


def job_dir(output_dir: Path, scheme: SchemeConfig, attack_id: str, cfg: AttackConfig) -> Path:
    label = report_service.attack_label(attack_id, cfg.delta)
    return Path(output_dir) / f"{scheme.scheme}{scheme.bits_or_r}" / label


def process_pair(job: AttackJob) -> JobResult:
    """Run one job; never raises so the pool keeps going."""
    image_id = job.spec.image_id
    try:
        cover, secret = load_pair(job.spec)
        scheme = make_scheme(job.scheme.scheme, job.scheme.bits, job.scheme.r)
        container = scheme.hide(cover, secret)
        attacked = make_attack(job.attack_id, job.cfg)(container)
        revealed_clean = scheme.reveal(container)
        revealed_attacked = scheme.reveal(attacked)
        record = report_pair(container, attacked, revealed_clean, revealed_attacked)

        job.out_dir.mkdir(parents=True, exist_ok=True)
        save_image(attacked, job.out_dir / f"{image_id}_attacked.png")
        save_image(revealed_attacked, job.out_dir / f"{image_id}_revealed.png")
        if job.figure_path is not None:
            attack_figure(cover, container, attacked, revealed_clean, revealed_attacked, job.figure_path)

        row = CsvRow(
            image_id=image_id,
            scheme=job.scheme.scheme,
            bits_or_r=job.scheme.bits_or_r,
            attack=job.attack_id,
            k=job.cfg.k,
            l=job.cfg.l,
            d=job.cfg.d,
            delta=job.cfg.delta,
            seed=job.cfg.seed,
            **record.model_dump(),
        )
        return JobResult(image_id, row=row)
    except Exception as e:
        return JobResult(image_id, error=f"{type(e).__name__}: {e}")


def build_jobs(cfg: RunConfig, setups: List[Tuple[str, AttackConfig]], specs: List[PairSpec]) -> List[AttackJob]:
    """Jobs ordered by scheme, then attack setting, then pair."""
    jobs: List[AttackJob] = []
    for scheme in cfg.schemes:
        for attack_id, attack_cfg in setups:
            out_dir = job_dir(cfg.output_dir, scheme, attack_id, attack_cfg)
            for i, spec in enumerate(specs):
                figure = None
                if cfg.figure and i == 0:
                    figure = cfg.output_dir / "figures" / f"{out_dir.parent.name}_{out_dir.name}.png"
                    figure.parent.mkdir(parents=True, exist_ok=True)
                jobs.append(AttackJob(spec, scheme, attack_id, attack_cfg, out_dir, figure))
    return jobs


def run_jobs(cfg: RunConfig, setups: List[Tuple[str, AttackConfig]]) -> Tuple[List[CsvRow], int, int]:
    """
    Execute every job through the worker pool and log per-image events.

    Returns:
        (rows in input order, succeeded count, total count)
    """
    specs = build_pairs(cfg.input_dir, cfg.pairs)
    jobs = build_jobs(cfg, setups, specs)
    print_info("Processing", f"{len(jobs)} jobs on {cfg.workers} worker(s)")
    results = ordered_map(process_pair, jobs, cfg.workers)

    rows: List[CsvRow] = []
    for job, result in zip(jobs, results):
        stage = f"{job.scheme.scheme}/{job.attack_id}"
        if result.row is not None:
            rows.append(result.row)
            log_image_event(result.image_id, stage, "ok", extra={"psnr_c": result.row.psnr_c})
        else:
            log_image_event(
                result.image_id, stage, "failed",
                detail=f"{job.spec.cover_path.name} + {job.spec.secret_path.name}: {result.error}",
            )
    return rows, len(rows), len(jobs)


def cmd_attack(cfg: RunConfig) -> int:
    """
    Attack every pair with every (scheme, attack) combination, write PNGs,
    the per-image CSV and the per-setting summary CSV.

    Returns:
        0 on success, 1 if any pair failed
    """
    print_header("PEEL attack run")
    setups = [(a, cfg.attack_config(a)) for a in cfg.attacks]
    rows, succeeded, total = run_jobs(cfg, setups)

    df = report_service.write_report(rows, cfg.report_path)
    if rows:
        report_service.write_summary(df, cfg.report_path)
    print_table("Means per setting", report_service.format_means(df))
    code = print_summary(succeeded, total)
    return code if total else EXIT_OK
