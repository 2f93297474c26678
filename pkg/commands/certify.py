"""
`certify` subcommand: one (epsilon, lambda) certificate per scheme/attack.
"""

import logging
from typing import List, Tuple

from app_logging.run_log import log_image_event
from commands._cli_utils import print_fail, print_header, print_pass, print_summary, print_table
from schemas.attack import RunConfig
from schemas.report import Certificate
from services import report_service
from services.dataset_service import build_pairs, load_pair
from services.hiding.oracles import make_scheme
from services.theory_service import certify_attack
from utils.image_buffer import ImageBuf

logger = logging.getLogger(__name__)


def load_corpus(cfg: RunConfig) -> Tuple[List[Tuple[ImageBuf, ImageBuf]], int]:
    """Loadable pairs in order, plus the number that failed to load."""
    corpus = []
    failures = 0
    for spec in build_pairs(cfg.input_dir, cfg.pairs):
        try:
            corpus.append(load_pair(spec))
        except Exception as e:
            failures += 1
            log_image_event(spec.image_id, "load", "failed", detail=str(e))
    return corpus, failures


def cmd_certify(cfg: RunConfig) -> int:
    """
    Returns:
        0 when every certificate was produced from every pair, else 1

    Raises:
        EmptyCorpusError: If the input directory yields no pairs
    """
    print_header("Removal-attack certification")
    corpus, load_failures = load_corpus(cfg)

    certs: List[Certificate] = []
    total = len(cfg.schemes) * len(cfg.attacks)
    for scheme_cfg in cfg.schemes:
        scheme = make_scheme(scheme_cfg.scheme, scheme_cfg.bits, scheme_cfg.r)
        for attack_id in cfg.attacks:
            label = f"{scheme.name}/{attack_id}"
            try:
                cert = certify_attack(
                    scheme,
                    attack_id,
                    cfg.attack_config(attack_id),
                    corpus,
                    gamma_trials=cfg.trials,
                    epsilon_target=cfg.epsilon_target,
                )
            except Exception as e:
                print_fail(label, str(e))
                logger.error(f"certification {label} failed: {e}")
                continue
            certs.append(cert)
            print_pass(label, f"eps={cert.epsilon_hat:.5f} lambda={cert.lambda_hat:.5f} gamma={cert.gamma_hat:.5f}")

    df = report_service.write_certificates(certs, cfg.report_path)
    if not df.empty:
        print_table("Certificates", df.to_string(index=False))
    code = print_summary(len(certs), total)
    if load_failures or any(c.failures for c in certs):
        return max(code, 1)
    return code
