from core.errors import ConfigError
from schemas.attack import AttackConfig
from services.inpaint.contract import Inpainter, ZeroFillInpainter
from services.inpaint.diffusion import DiffusionInpainter
from services.inpaint.external import ExternalInpainter


def make_inpainter(cfg: AttackConfig) -> Inpainter:
    """
    Build the inpainter selected by cfg.inpainter.

    Raises:
        ConfigError: If the id is unknown or 'external' has no command
    """
    if cfg.inpainter == "zero":
        return ZeroFillInpainter()
    if cfg.inpainter == "diffusion":
        return DiffusionInpainter(
            max_iters=cfg.max_iters,
            tol=cfg.diffusion_tol,
            method=cfg.diffusion_method,
            dr_blend=cfg.dr_blend,
        )
    if cfg.inpainter == "external":
        if not cfg.external_cmd:
            raise ConfigError("inpainter 'external' needs external_cmd")
        return ExternalInpainter(cfg.external_cmd)
    raise ConfigError(f"unknown inpainter {cfg.inpainter!r}")
