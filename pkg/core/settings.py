"""
Configuration settings for the PEEL toolkit.
Holds the attack defaults and the two ambient environment knobs.
"""

import os
from typing import Optional

import psutil
from dotenv import load_dotenv

# Load .env from the working directory; never overrides real env vars
load_dotenv(override=False)

# Logging
LOG_LEVEL: str = os.getenv("PEEL_LOG_LEVEL", "INFO")

# Worker pool size; results never depend on it
_cpu: Optional[int] = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
WORKERS: int = int(os.getenv("PEEL_WORKERS", str(_cpu)))

# PEEL defaults
PEEL_K: int = 25
PEEL_L: int = 35

# PEEL-O defaults
PEELO_K: int = 50
PEELO_L: int = 60
PEELO_D: int = 2
PEELO_DELTA: float = 0.05
DELTA_SWEEP: tuple = (0.05, 0.1, 0.2)

# Baselines
GN_DELTAS: tuple = (0.03, 0.05)
GB_KSIZE: int = 5
GB_SIGMA: float = 3.0
MB_KSIZE: int = 5

# Hiding oracles
DEFAULT_BITS: int = 4
DEFAULT_SPREAD_R: int = 1

# Diffusion inpainter
DIFFUSION_TOL: float = 1e-5
DIFFUSION_ITER_FACTOR: int = 10  # max_iters = factor * l^2
DIFFUSION_METHOD: str = "sor"
DR_BLEND: float = 0.3

# Edge detector
CANNY_SIGMA: float = 2.0
CANNY_LO: float = 0.1
CANNY_HI: float = 0.2

# VIF
VIF_SIGMA_NSQ: float = 2.0
VIF_MIN_SIDE: int = 32

# Reports
PSNR_INF_TOKEN: str = "inf"
FIGURE_MARGIN: int = 4


def print_config_summary():
    """Print a summary of the current configuration."""
    print("🔧 Configuration Summary:")
    print(f"  Log level: {LOG_LEVEL}")
    print(f"  Workers: {WORKERS}")
    print(f"  PEEL: k={PEEL_K}, l={PEEL_L}")
    print(f"  PEEL-O: k={PEELO_K}, l={PEELO_L}, d={PEELO_D}, delta={PEELO_DELTA}")
    print(f"  Baselines: GN{GN_DELTAS}, GB({GB_KSIZE}, {GB_SIGMA}), MB({MB_KSIZE})")
    print(f"  Diffusion: method={DIFFUSION_METHOD}, tol={DIFFUSION_TOL}, dr_blend={DR_BLEND}")
    print(f"  Canny: sigma={CANNY_SIGMA}, lo={CANNY_LO}, hi={CANNY_HI}")


if __name__ == "__main__":
    print_config_summary()
