"""
Corpus ingestion: PNG discovery and cover/secret pairing.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from core.errors import ConfigError, EmptyCorpusError
from utils.image_buffer import ImageBuf, load_image, require_same_shape

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairSpec:
    """One cover/secret assignment; image_id is the cover's file stem."""

    image_id: str
    cover_path: Path
    secret_path: Path


def list_images(input_dir: Path) -> List[Path]:
    """PNG files directly inside input_dir, sorted by name."""
    input_dir = Path(input_dir)
    if not input_dir.is_dir():
        raise ConfigError(f"input directory {input_dir} does not exist")
    return sorted(p for p in input_dir.iterdir() if p.is_file() and p.suffix.lower() == ".png")


def shifted_pairs(paths: List[Path]) -> List[PairSpec]:
    """secret_i = cover_{(i + 1) mod N}."""
    n = len(paths)
    return [PairSpec(p.stem, p, paths[(i + 1) % n]) for i, p in enumerate(paths)]


def read_pair_list(input_dir: Path, list_file: Path) -> List[PairSpec]:
    """
    Parse a paired-list file: one 'cover.png secret.png' (or comma separated)
    per line, paths relative to input_dir; blank lines and '#' comments skipped.

    Raises:
        ConfigError: On malformed lines or missing files
    """
    pairs: List[PairSpec] = []
    for lineno, raw in enumerate(Path(list_file).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise ConfigError(f"{list_file}:{lineno}: expected 'cover secret', got {line!r}")
        cover, secret = (Path(input_dir) / parts[0], Path(input_dir) / parts[1])
        for p in (cover, secret):
            if not p.is_file():
                raise ConfigError(f"{list_file}:{lineno}: {p} does not exist")
        pairs.append(PairSpec(cover.stem, cover, secret))
    return pairs


def build_pairs(input_dir: Path, pairs: str = "shifted") -> List[PairSpec]:
    """
    Resolve the secret-assignment rule into pair specs.

    Raises:
        EmptyCorpusError: If no pairs result
    """
    if pairs == "shifted":
        specs = shifted_pairs(list_images(input_dir))
    else:
        specs = read_pair_list(input_dir, Path(pairs))
    if not specs:
        raise EmptyCorpusError(f"no PNG pairs found in {input_dir}")
    logger.info(f"Found {len(specs)} cover/secret pairs in {input_dir}")
    return specs


def load_pair(spec: PairSpec) -> Tuple[ImageBuf, ImageBuf]:
    """
    Raises:
        ImageFormatError, ImageIOError: On unreadable files
        DimensionMismatchError: If cover and secret differ in shape
    """
    cover = load_image(spec.cover_path)
    secret = load_image(spec.secret_path)
    require_same_shape(cover, secret, f"cover {spec.cover_path.name} and secret {spec.secret_path.name}")
    return cover, secret
