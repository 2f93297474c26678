"""
Builds a RunConfig from an optional key=value file and command-line flags.
Flags win over file values; anything left unset falls back to the defaults
in core.settings.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values

from core import settings
from core.errors import ConfigError
from schemas.attack import RunConfig, SchemeConfig

logger = logging.getLogger(__name__)

# flag dest -> AttackConfig field
ATTACK_KEYS = ("k", "l", "d", "delta", "seed", "inpainter", "external_cmd", "use_edge", "use_dr")
RUN_KEYS = ("in", "out", "report", "scheme", "bits", "r", "attack", "pairs", "workers",
            "figure", "deltas", "trials", "epsilon_target")


def read_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """Parse key=value lines; keys may use dashes or underscores."""
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    raw = dotenv_values(path)
    values = {}
    for key, value in raw.items():
        if value is None:
            continue
        norm = key.strip().lower().replace("-", "_")
        if norm not in ATTACK_KEYS + RUN_KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        values[norm] = value
    return values


def merge_values(args: argparse.Namespace) -> Dict[str, Any]:
    """File values overlaid with every flag the user actually passed."""
    values = read_config_file(getattr(args, "config", None))
    for key in ATTACK_KEYS + RUN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _schemes(values: Dict[str, Any]) -> list:
    names = str(values.get("scheme", "lsb"))
    bits = values.get("bits", settings.DEFAULT_BITS)
    r = values.get("r", settings.DEFAULT_SPREAD_R)
    return [SchemeConfig(scheme=name.strip(), bits=bits, r=r) for name in names.split(",") if name.strip()]


def build_run_config(args: argparse.Namespace, default_attack: str = "peel") -> RunConfig:
    """
    Raises:
        ConfigError, pydantic.ValidationError: On invalid or missing values
    """
    values = merge_values(args)
    if "in" not in values:
        raise ConfigError("--in is required (flag or config file)")
    input_dir = Path(values["in"])
    output_dir = Path(values.get("out", "peel_out"))
    report = Path(values["report"]) if "report" in values else output_dir / "report.csv"

    run: Dict[str, Any] = {
        "input_dir": input_dir,
        "output_dir": output_dir,
        "report_path": report,
        "schemes": _schemes(values),
        "attacks": values.get("attack", default_attack),
        "attack_overrides": {k: values[k] for k in ATTACK_KEYS if k in values},
        "workers": values.get("workers", settings.WORKERS),
    }
    for key in ("pairs", "figure", "deltas", "trials", "epsilon_target"):
        if key in values:
            run[key] = values[key]

    cfg = RunConfig(**run)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    cfg.report_path.parent.mkdir(parents=True, exist_ok=True)
    logger.debug(f"run config: {cfg.model_dump()}")
    return cfg
