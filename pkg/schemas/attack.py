from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core import settings
from core.errors import ConfigError

AttackId = Literal["none", "peel", "peelo", "gn", "gb", "mb"]
InpainterId = Literal["zero", "diffusion", "external"]
SchemeId = Literal["lsb", "spread"]

ATTACK_IDS = ("none", "peel", "peelo", "gn", "gb", "mb")
SCHEME_IDS = ("lsb", "spread")


class AttackConfig(BaseModel):
    """PEEL / PEEL-O hyperparameters plus inpainter selection."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(settings.PEEL_K, ge=1, description="Grid cell side")
    l: int = Field(settings.PEEL_L, ge=1, description="Removal box side (l > k)")
    d: int = Field(settings.PEELO_D, ge=1, description="PEEL-O phase stride")
    delta: float = Field(settings.PEELO_DELTA, ge=0.0, description="Noise scale for DR and GN")
    seed: int = Field(0, description="64-bit seed for every random draw")
    inpainter: InpainterId = "diffusion"
    external_cmd: Optional[str] = Field(None, description="Command template for the external inpainter")
    use_edge: bool = False
    use_dr: bool = False
    dr_blend: float = Field(settings.DR_BLEND, ge=0.0, le=1.0)
    diffusion_method: Literal["jacobi", "sor"] = settings.DIFFUSION_METHOD
    diffusion_tol: float = Field(settings.DIFFUSION_TOL, gt=0.0)
    diffusion_iter_factor: int = Field(settings.DIFFUSION_ITER_FACTOR, ge=1)
    canny_sigma: float = Field(settings.CANNY_SIGMA, gt=0.0)
    canny_lo: float = Field(settings.CANNY_LO, ge=0.0)
    canny_hi: float = Field(settings.CANNY_HI, gt=0.0)

    @model_validator(mode="after")
    def check_geometry(self):
        if self.l <= self.k:
            raise ConfigError(f"l must exceed k (got k={self.k}, l={self.l})")
        if (self.l - self.k) % 2:
            raise ConfigError(f"l - k must be even (got k={self.k}, l={self.l})")
        if self.canny_lo >= self.canny_hi:
            raise ConfigError(f"canny lo must be below hi (got {self.canny_lo}, {self.canny_hi})")
        if self.inpainter == "external" and not self.external_cmd:
            raise ConfigError("inpainter 'external' needs external_cmd")
        return self

    @property
    def max_iters(self) -> int:
        return self.diffusion_iter_factor * self.l * self.l

    def require_sparse_phases(self) -> None:
        """PEEL-O needs same-phase boxes to stay apart: l < (d + 1) k."""
        if self.l >= (self.d + 1) * self.k:
            raise ConfigError(
                f"l={self.l} must be below (d+1)*k={(self.d + 1) * self.k} for PEEL-O"
            )

    @classmethod
    def peel_defaults(cls, **overrides) -> "AttackConfig":
        values = {"k": settings.PEEL_K, "l": settings.PEEL_L}
        values.update(overrides)
        return cls(**values)

    @classmethod
    def peelo_defaults(cls, **overrides) -> "AttackConfig":
        values = {
            "k": settings.PEELO_K,
            "l": settings.PEELO_L,
            "d": settings.PEELO_D,
            "delta": settings.PEELO_DELTA,
            "use_edge": True,
            "use_dr": True,
        }
        values.update(overrides)
        return cls(**values)


class SchemeConfig(BaseModel):
    """Oracle hiding scheme selection."""

    model_config = ConfigDict(frozen=True)

    scheme: SchemeId = "lsb"
    bits: int = Field(settings.DEFAULT_BITS, ge=1, le=8)
    r: int = Field(settings.DEFAULT_SPREAD_R, ge=1)

    @model_validator(mode="after")
    def check_bits(self):
        if self.scheme == "lsb" and self.bits > 4:
            raise ConfigError(f"lsb supports bits in [1, 4], got {self.bits}")
        if self.scheme == "spread" and (2 * self.r + 1) ** 2 < self.bits:
            raise ConfigError(f"spread r={self.r} has too few slots for bits={self.bits}")
        return self

    @property
    def bits_or_r(self) -> int:
        return self.bits if self.scheme == "lsb" else self.r


class RunConfig(BaseModel):
    """Everything a CLI subcommand needs."""

    input_dir: Path
    output_dir: Path
    report_path: Path
    schemes: List[SchemeConfig] = Field(default_factory=lambda: [SchemeConfig()])
    attacks: List[AttackId] = Field(default_factory=lambda: ["peel"])
    attack_overrides: Dict[str, Any] = Field(default_factory=dict, description="Explicit AttackConfig fields")
    pairs: str = Field("shifted", description="'shifted' or a path to a paired-list file")
    workers: int = Field(1, ge=1)
    figure: bool = False
    deltas: List[float] = Field(default_factory=lambda: list(settings.DELTA_SWEEP))
    trials: int = Field(20, ge=1)
    epsilon_target: Optional[float] = Field(None, ge=0.0)

    @field_validator("attacks", mode="before")
    @classmethod
    def split_attacks(cls, v):
        if isinstance(v, str):
            return [a.strip() for a in v.split(",") if a.strip()]
        return v

    @field_validator("deltas", mode="before")
    @classmethod
    def split_deltas(cls, v):
        if isinstance(v, str):
            return [float(x) for x in v.split(",") if x.strip()]
        return v

    @field_validator("deltas")
    @classmethod
    def check_deltas(cls, v):
        if any(x < 0 for x in v):
            raise ConfigError(f"deltas must be >= 0, got {v}")
        return v

    @model_validator(mode="after")
    def check_paths(self):
        if not self.input_dir.is_dir():
            raise ConfigError(f"input directory {self.input_dir} does not exist")
        if self.pairs != "shifted" and not Path(self.pairs).is_file():
            raise ConfigError(f"pair list {self.pairs} does not exist")
        for attack_id in self.attacks:
            self.attack_config(attack_id)
        return self

    @property
    def seed(self) -> int:
        return int(self.attack_overrides.get("seed", 0))

    def attack_config(self, attack_id: str, **extra) -> AttackConfig:
        """Published defaults for the attack, with explicit flags layered on top."""
        overrides = {**self.attack_overrides, **extra}
        if attack_id == "peelo":
            cfg = AttackConfig.peelo_defaults(**overrides)
            cfg.require_sparse_phases()
            return cfg
        if attack_id == "gn" and "delta" not in overrides:
            overrides["delta"] = settings.GN_DELTAS[0]
        return AttackConfig.peel_defaults(**overrides)
