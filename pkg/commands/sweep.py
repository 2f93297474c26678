"""
`sweep` subcommand: PEEL-O and GN over a list of noise scales, with a
comparison table of corpus means.
"""

import logging
from typing import List, Tuple

from commands._cli_utils import EXIT_OK, print_header, print_summary, print_table
from commands.attack import run_jobs
from schemas.attack import AttackConfig, RunConfig
from services import report_service

logger = logging.getLogger(__name__)

SWEPT_ATTACKS = ("peelo", "gn")


def sweep_setups(cfg: RunConfig) -> List[Tuple[str, AttackConfig]]:
    """Fixed attacks once, swept attacks once per delta; delta-major order."""
    setups = [(a, cfg.attack_config(a)) for a in cfg.attacks if a not in SWEPT_ATTACKS]
    swept = [a for a in cfg.attacks if a in SWEPT_ATTACKS] or list(SWEPT_ATTACKS)
    for delta in cfg.deltas:
        for attack_id in swept:
            setups.append((attack_id, cfg.attack_config(attack_id, delta=delta)))
    return setups


def cmd_sweep(cfg: RunConfig) -> int:
    print_header("Noise-scale sweep")
    rows, succeeded, total = run_jobs(cfg, sweep_setups(cfg))

    df = report_service.write_report(rows, cfg.report_path)
    if rows:
        report_service.write_summary(df, cfg.report_path)
        pivot_path = cfg.report_path.with_name(f"{cfg.report_path.stem}.pivot.csv")
        table = report_service.write_pivot(df, pivot_path)
        print_table("Comparison table", table.to_string(float_format=lambda v: f"{v:.4f}"))
    code = print_summary(succeeded, total)
    return code if total else EXIT_OK
