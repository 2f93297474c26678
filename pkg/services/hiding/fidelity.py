import logging
from typing import Sequence, Tuple

from core.errors import EmptyCorpusError
from services.hiding.oracles import HidingScheme
from services.metrics_service import get_distance
from utils.image_buffer import ImageBuf

logger = logging.getLogger(__name__)


def measure_xi(
    scheme: HidingScheme,
    corpus: Sequence[Tuple[ImageBuf, ImageBuf]],
    metric: str = "rmse",
) -> Tuple[float, float]:
    """
    Empirical hiding fidelity over (cover, secret) pairs.

    Returns:
        (mean D(c, c'), mean D(s, reveal(c'))); the scheme is an empirical
        xi-deep hiding for xi = max of the two

    Raises:
        EmptyCorpusError: If corpus is empty
    """
    if not corpus:
        raise EmptyCorpusError("measure_xi needs at least one (cover, secret) pair")
    distance = get_distance(metric)
    cover_sum = secret_sum = 0.0
    for c, s in corpus:
        c_prime = scheme.hide(c, s)
        cover_sum += distance(c, c_prime)
        secret_sum += distance(s, scheme.reveal(c_prime))
    n = len(corpus)
    xi_cover, xi_secret = cover_sum / n, secret_sum / n
    logger.debug(f"{scheme.describe()}: xi_cover={xi_cover:.6f}, xi_secret={xi_secret:.6f} over {n} pairs")
    return xi_cover, xi_secret
