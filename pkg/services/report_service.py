"""
CSV reporting for attack runs, certificates and probes.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, List

import pandas as pd

from core import settings
from schemas.report import Certificate, CsvRow, ProbeRow

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "image_id", "scheme", "bits_or_r", "attack", "k", "l", "d", "delta", "seed",
    "rmse_c", "rmse_s", "psnr_c", "psnr_s", "vif_c", "vif_s",
]
METRIC_COLUMNS = ["rmse_c", "rmse_s", "psnr_c", "psnr_s", "vif_c", "vif_s"]
SETTING_COLUMNS = ["scheme", "bits_or_r", "attack", "k", "l", "d", "delta"]
PIVOT_COLUMNS = ["psnr_c", "psnr_s", "vif_c", "vif_s"]

# Attacks whose label carries their noise scale
_DELTA_ATTACKS = ("peelo", "gn")


def _write_csv(df: pd.DataFrame, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = df.replace(math.inf, settings.PSNR_INF_TOKEN)
    out.to_csv(path, index=False, na_rep="nan", lineterminator="\n")
    logger.info(f"Wrote {len(df)} rows to {path}")


def rows_frame(rows: Iterable[CsvRow]) -> pd.DataFrame:
    records = [r.model_dump() for r in rows]
    return pd.DataFrame(records, columns=CSV_COLUMNS)


def write_report(rows: List[CsvRow], path: Path) -> pd.DataFrame:
    """One line per image, header first, columns in CSV_COLUMNS order."""
    df = rows_frame(rows)
    _write_csv(df, path)
    return df


def summary_path(report_path: Path) -> Path:
    report_path = Path(report_path)
    return report_path.with_name(f"{report_path.stem}.summary.csv")


def attack_label(attack: str, delta: float) -> str:
    if attack in _DELTA_ATTACKS:
        return f"{attack}({delta:g})"
    return attack


def summary_frame(df: pd.DataFrame) -> pd.DataFrame:
    """Per-setting means of the metric columns, plus the row count."""
    grouped = df.groupby(SETTING_COLUMNS, sort=False)
    means = grouped[METRIC_COLUMNS].mean()
    means.insert(0, "n", grouped.size())
    return means.reset_index()


def write_summary(df: pd.DataFrame, report_path: Path) -> pd.DataFrame:
    summary = summary_frame(df)
    _write_csv(summary, summary_path(report_path))
    return summary


def pivot_table(df: pd.DataFrame) -> pd.DataFrame:
    """
    Comparison table: one row per attack setting, one column per reported
    metric (PSNR-C, PSNR-S, VIF-C, VIF-S), cells are corpus means.
    """
    labelled = df.assign(setting=[attack_label(a, d) for a, d in zip(df["attack"], df["delta"])])
    table = labelled.groupby(["scheme", "setting"], sort=False)[PIVOT_COLUMNS].mean()
    return table


def write_pivot(df: pd.DataFrame, path: Path) -> pd.DataFrame:
    table = pivot_table(df)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.replace(math.inf, settings.PSNR_INF_TOKEN).to_csv(path, na_rep="nan", lineterminator="\n")
    logger.info(f"Wrote comparison table to {path}")
    return table


def write_certificates(certs: List[Certificate], path: Path) -> pd.DataFrame:
    df = pd.DataFrame([c.model_dump() for c in certs])
    _write_csv(df, path)
    return df


def write_probe_rows(rows: List[ProbeRow], path: Path) -> pd.DataFrame:
    df = pd.DataFrame([r.model_dump() for r in rows], columns=list(ProbeRow.model_fields))
    _write_csv(df, path)
    return df


def read_report(path: Path) -> pd.DataFrame:
    """Load a report written by write_report; 'inf' parses back to +inf."""
    return pd.read_csv(path, na_values=["nan"], keep_default_na=False)


def format_means(df: pd.DataFrame) -> str:
    """Console rendering of the per-setting means."""
    if df.empty:
        return "(no rows)"
    summary = summary_frame(df)
    return summary.to_string(index=False, float_format=lambda v: f"{v:.4f}")
