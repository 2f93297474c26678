# main.py
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from app_logging import configure_logging
from commands._cli_utils import EXIT_CONFIG, print_fail
from commands.attack import cmd_attack
from commands.certify import cmd_certify
from commands.config_loader import build_run_config
from commands.inpaint_eval import cmd_inpaint_eval
from commands.probe import cmd_probe
from commands.sweep import cmd_sweep
from core.errors import ConfigError, EmptyCorpusError
from schemas.attack import RunConfig

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "attack": cmd_attack,
    "certify": cmd_certify,
    "probe": cmd_probe,
    "inpaint-eval": cmd_inpaint_eval,
    "sweep": cmd_sweep,
}

DEFAULT_ATTACK = {
    "attack": "peel",
    "certify": "peel",
    "probe": "none",
    "inpaint-eval": "peel",
    "sweep": "peelo,gn",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    # every default is None so config-file values can fill the gaps
    parser.add_argument("--in", dest="in", type=Path, help="input directory of PNG images")
    parser.add_argument("--out", dest="out", type=Path, help="output directory")
    parser.add_argument("--report", type=Path, help="CSV report path (default <out>/report.csv)")
    parser.add_argument("--config", type=Path, help="optional key=value config file")
    parser.add_argument("--scheme", help="lsb | spread (comma separated for several)")
    parser.add_argument("--bits", type=int, help="embedding depth")
    parser.add_argument("--r", type=int, help="spread locality radius")
    parser.add_argument("--attack", help="none | peel | peelo | gn | gb | mb (comma separated)")
    parser.add_argument("--pairs", help="'shifted' or a paired-list file")
    parser.add_argument("--k", type=int, help="grid cell side")
    parser.add_argument("--l", type=int, help="removal box side")
    parser.add_argument("--d", type=int, help="PEEL-O phase stride")
    parser.add_argument("--delta", type=float, help="noise scale for DR and GN")
    parser.add_argument("--seed", type=int, help="64-bit seed")
    parser.add_argument("--inpainter", choices=["zero", "diffusion", "external"])
    parser.add_argument("--external-cmd", dest="external_cmd", help="external inpainter command")
    parser.add_argument("--use-edge", dest="use_edge", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--use-dr", dest="use_dr", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--workers", type=int, help="worker processes")
    parser.add_argument("--figure", action=argparse.BooleanOptionalAction, default=None,
                        help="write an image grid for the first pair")
    parser.add_argument("--deltas", help="comma separated noise scales for sweep")
    parser.add_argument("--trials", type=int, help="gamma trials / probe samples")
    parser.add_argument("--epsilon-target", dest="epsilon_target", type=float,
                        help="epsilon to check the gamma bound against")
    parser.add_argument("--log-level", dest="log_level", help="overrides PEEL_LOG_LEVEL")


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="peel",
        description="Steganography removal attacks (PEEL / PEEL-O) with certification and probes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common(sub.add_parser(name))
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    configure_logging(args.log_level)
    try:
        cfg = build_run_config(args, DEFAULT_ATTACK[args.command])
        return COMMANDS[args.command](cfg)
    except (ConfigError, ValidationError, EmptyCorpusError) as e:
        print_fail(f"{args.command} configuration", str(e))
        logger.error(f"{args.command}: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
