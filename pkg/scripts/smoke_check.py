# -*- coding: utf-8 -*-
#!/usr/bin/env python3
"""
End-to-end smoke check on a synthetic corpus.
Writes a few PNGs to a temporary directory, runs every subcommand and
prints a PASS/FAIL summary.
"""

import sys
import tempfile
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np

# Add repository root to path
ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from commands._cli_utils import print_fail, print_header, print_pass, print_summary  # noqa: E402
from main import main  # noqa: E402
from utils.filters import smooth2d  # noqa: E402
from utils.image_buffer import ImageBuf, save_image  # noqa: E402

SIZE = 64
N_IMAGES = 3


def synthetic_image(seed: int) -> ImageBuf:
    """Smoothed noise plus a gradient and a hard edge, RGB."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:SIZE, 0:SIZE] / SIZE
    planes = []
    for ch in range(3):
        noise = smooth2d(rng.random((SIZE, SIZE)), 9, 2.0)
        plane = 0.45 * noise + 0.35 * (xx if ch % 2 else yy) + 0.2 * (xx > 0.5 + 0.1 * ch)
        planes.append(plane)
    data = np.stack(planes, axis=2)
    data = (data - data.min()) / (data.max() - data.min())
    return ImageBuf(data)


def write_corpus(folder: Path) -> None:
    folder.mkdir(parents=True, exist_ok=True)
    for i in range(N_IMAGES):
        save_image(synthetic_image(i), folder / f"img{i:02d}.png")


def run_checks(workdir: Path) -> List[Tuple[str, bool, str]]:
    corpus = workdir / "corpus"
    write_corpus(corpus)
    out = workdir / "out"
    common = ["--in", str(corpus), "--out", str(out), "--workers", "1"]
    small = ["--k", "16", "--l", "20", "--d", "2"]

    checks: List[Tuple[str, Callable[[], int], int]] = [
        ("attack none", lambda: main(["attack", *common, "--attack", "none", "--report", str(out / "none.csv")]), 0),
        ("attack peel zero-fill", lambda: main(["attack", *common, *small, "--attack", "peel",
                                                "--inpainter", "zero", "--report", str(out / "peel.csv")]), 0),
        ("attack peelo diffusion", lambda: main(["attack", *common, *small, "--attack", "peelo",
                                                 "--use-edge", "--use-dr", "--figure",
                                                 "--report", str(out / "peelo.csv")]), 0),
        ("attack baselines", lambda: main(["attack", *common, "--attack", "gn,gb,mb",
                                           "--report", str(out / "baselines.csv")]), 0),
        ("certify", lambda: main(["certify", *common, *small, "--attack", "none,peel", "--inpainter", "zero",
                                  "--trials", "4", "--report", str(out / "cert.csv")]), 0),
        ("probe", lambda: main(["probe", *common, "--scheme", "lsb,spread", "--trials", "3",
                                "--report", str(out / "probe.csv")]), 0),
        ("inpaint-eval", lambda: main(["inpaint-eval", *common, *small, "--trials", "4",
                                       "--report", str(out / "gamma.csv")]), 0),
        ("sweep", lambda: main(["sweep", *common, *small, "--deltas", "0.05,0.1",
                                "--report", str(out / "sweep.csv")]), 0),
        ("config error exit code", lambda: main(["attack", *common, "--k", "10", "--l", "10"]), 2),
    ]

    results = []
    for label, fn, expected in checks:
        try:
            code = fn()
            results.append((label, code == expected, f"exit {code}, expected {expected}"))
        except Exception as e:
            results.append((label, False, repr(e)))
    return results


def main_smoke() -> int:
    print_header("PEEL smoke check")
    with tempfile.TemporaryDirectory(prefix="peel-smoke-") as tmp:
        results = run_checks(Path(tmp))
    passed = 0
    for label, ok, detail in results:
        if ok:
            passed += 1
            print_pass(label, detail)
        else:
            print_fail(label, detail)
    return print_summary(passed, len(results))


if __name__ == "__main__":
    sys.exit(main_smoke())
