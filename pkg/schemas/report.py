import math
from typing import Optional

from pydantic import BaseModel, Field, computed_field


class MetricRecord(BaseModel):
    """C-metrics compare containers, S-metrics compare reveals (before vs after attack)."""

    psnr_c: float = Field(..., ge=0.0)
    psnr_s: float = Field(..., ge=0.0)
    vif_c: float = Field(..., ge=0.0)
    vif_s: float = Field(..., ge=0.0)
    rmse_c: float = Field(..., ge=0.0, le=1.0)
    rmse_s: float = Field(..., ge=0.0, le=1.0)


class CsvRow(MetricRecord):
    """One line of the per-image attack report."""

    image_id: str
    scheme: str
    bits_or_r: int
    attack: str
    k: int
    l: int
    d: int
    delta: float
    seed: int


class Certificate(BaseModel):
    """Empirical (epsilon, lambda) measurement for one scheme/attack pair."""

    scheme: str
    attack: str
    epsilon_hat: float = Field(..., ge=0.0, description="mean D(c', F(c'))")
    lambda_hat: float = Field(..., ge=0.0, description="mean D(s', R(F(c')))")
    gamma_hat: float = Field(..., ge=0.0)
    K: int = Field(..., ge=1, description="padded width")
    K_h: int = Field(..., ge=1, description="padded height")
    k: int = Field(..., ge=1)
    epsilon_target: Optional[float] = None
    bound_ok: Optional[bool] = None
    vif_c_mean: float = 0.0
    vif_s_mean: float = 0.0
    n_images: int = 0
    failures: int = 0

    @computed_field
    @property
    def epsilon_bound(self) -> float:
        """Smallest epsilon whose hypothesis holds at gamma_hat."""
        from services.theory_service import epsilon_bound

        if (self.K // self.k) * (self.K_h // self.k) <= 1:
            return math.inf
        return epsilon_bound(self.gamma_hat, self.K, self.k, self.K_h)


class ProbeRow(BaseModel):
    """One vulnerability-probe measurement."""

    scheme: str
    probe: str
    mode: str
    x: int
    y: int
    w: int = 1
    h: int = 1
    value: Optional[float] = None
    in_region_err: Optional[float] = None
    out_region_err: Optional[float] = None
    affected_count: Optional[int] = None
