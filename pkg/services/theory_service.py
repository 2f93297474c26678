"""
Removal-attack theory: the gamma -> epsilon bound and the empirical
(epsilon, lambda) certifier.
"""

import logging
import math
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from core import settings
from core.errors import ConfigError, EmptyCorpusError
from schemas.attack import AttackConfig
from schemas.report import Certificate
from services.hiding.oracles import HidingScheme
from services.inpaint.contract import Inpainter
from services.inpaint.factory import make_inpainter
from services.inpaint.gamma import estimate_gamma
from services.metrics_service import get_distance, vif
from services.removal_service import grid_partition, make_attack
from utils.image_buffer import ImageBuf

logger = logging.getLogger(__name__)

REMOVAL_ATTACKS = ("peel", "peelo")


def _cell_factor(K: int, k: int, K_h: Optional[int] = None) -> int:
    """(K/k)(K_h/k) - 1 as an exact integer."""
    K_h = K if K_h is None else K_h
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if K % k or K_h % k:
        raise ConfigError(f"K={K}, K_h={K_h} must be multiples of k={k}")
    cells = (K // k) * (K_h // k)
    if cells <= 1:
        raise ConfigError(f"need more than one cell, got K={K}, K_h={K_h}, k={k}")
    return cells - 1


def _exact(value: float) -> Fraction:
    # the decimal a float prints as, so 0.01 * 35 == 0.35 holds exactly
    return Fraction(repr(float(value)))


def epsilon_bound(gamma: float, K: int, k: int, K_h: Optional[int] = None) -> float:
    """
    Smallest epsilon whose removal guarantee holds at inpainting error gamma:
    gamma * ((K/k)^2 - 1), or gamma * ((K/k)(K_h/k) - 1) for a K x K_h canvas.

    The product is taken exactly and rounded up to the next float when
    needed, so check_theorem(gamma, epsilon_bound(gamma, ...), ...) holds.

    Raises:
        ConfigError: If K is not a multiple of k or there is only one cell
    """
    exact = _exact(gamma) * _cell_factor(K, k, K_h)
    bound = float(exact)
    while _exact(bound) < exact:
        bound = math.nextafter(bound, math.inf)
    return bound


def check_theorem(gamma: float, epsilon: float, K: int, k: int, K_h: Optional[int] = None) -> bool:
    """
    True iff gamma <= epsilon / ((K/k)^2 - 1).

    Both reals are compared exactly as the decimals they print as, against
    the integer cell factor; an epsilon produced by epsilon_bound for the
    same gamma always passes.
    """
    return _exact(gamma) * _cell_factor(K, k, K_h) <= _exact(epsilon)


def _vif_or_nan(ref: ImageBuf, dist: ImageBuf) -> float:
    if min(ref.width, ref.height) < settings.VIF_MIN_SIDE:
        return math.nan
    return vif(ref, dist)


def certify_attack(
    scheme: HidingScheme,
    attack_id: str,
    cfg: AttackConfig,
    corpus: Sequence[Tuple[ImageBuf, ImageBuf]],
    metric: str = "rmse",
    gamma_trials: int = 20,
    epsilon_target: Optional[float] = None,
    inpainter: Optional[Inpainter] = None,
) -> Certificate:
    """
    Empirical (epsilon, lambda) certificate of one attack on one scheme.

    For each pair: c' = hide(c, s), s' = reveal(c'), a = F(c'); epsilon_hat
    and lambda_hat are the means of D(c', a) and D(s', reveal(a)). For PEEL
    and PEEL-O, gamma_hat comes from estimate_gamma on the containers with
    the attack's inpainter and l. Per-image attack failures are counted and
    excluded from the means.

    Raises:
        EmptyCorpusError: If corpus is empty or every image failed
    """
    if not corpus:
        raise EmptyCorpusError("certify_attack needs at least one (cover, secret) pair")
    distance = get_distance(metric)
    chosen = inpainter
    if attack_id in REMOVAL_ATTACKS and chosen is None:
        chosen = make_inpainter(cfg)
    attack = make_attack(attack_id, cfg, chosen)

    eps_terms, lam_terms, vif_c_terms, vif_s_terms = [], [], [], []
    containers = []
    failures = 0
    for idx, (c, s) in enumerate(corpus):
        c_prime = scheme.hide(c, s)
        containers.append(c_prime)
        try:
            attacked = attack(c_prime)
        except Exception as e:
            failures += 1
            logger.error(f"{attack_id} failed on pair {idx}: {e}")
            continue
        s_prime = scheme.reveal(c_prime)
        s_attacked = scheme.reveal(attacked)
        eps_terms.append(distance(c_prime, attacked))
        lam_terms.append(distance(s_prime, s_attacked))
        vif_c_terms.append(_vif_or_nan(c_prime, attacked))
        vif_s_terms.append(_vif_or_nan(s_prime, s_attacked))

    if not eps_terms:
        raise EmptyCorpusError(f"{attack_id} failed on all {len(corpus)} pairs")

    grid = grid_partition(corpus[0][0].width, corpus[0][0].height, cfg.k)
    gamma_hat = 0.0
    bound_ok = None
    if attack_id in REMOVAL_ATTACKS:
        gamma_hat = estimate_gamma(
            chosen, containers, cfg.l, gamma_trials, metric, seed=cfg.seed,
            use_edge=cfg.use_edge, use_dr=cfg.use_dr, delta=cfg.delta,
        )
        if epsilon_target is not None and grid.cell_count > 1:
            bound_ok = check_theorem(gamma_hat, epsilon_target, grid.width, cfg.k, grid.height)

    n = len(eps_terms)
    cert = Certificate(
        scheme=scheme.name,
        attack=attack_id,
        epsilon_hat=math.fsum(eps_terms) / n,
        lambda_hat=math.fsum(lam_terms) / n,
        gamma_hat=gamma_hat,
        K=grid.width,
        K_h=grid.height,
        k=cfg.k,
        epsilon_target=epsilon_target,
        bound_ok=bound_ok,
        vif_c_mean=math.fsum(vif_c_terms) / n,
        vif_s_mean=math.fsum(vif_s_terms) / n,
        n_images=n,
        failures=failures,
    )
    logger.info(
        f"certificate {scheme.name}/{attack_id}: eps={cert.epsilon_hat:.6f}, "
        f"lambda={cert.lambda_hat:.6f}, gamma={gamma_hat:.6f}, bound={cert.epsilon_bound:.6f}"
    )
    return cert
