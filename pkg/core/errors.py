"""
Exception hierarchy for the PEEL toolkit.
"""

from typing import Optional


class PeelError(Exception):
    """Base class for all toolkit errors."""


class ImageFormatError(PeelError, ValueError):
    """Input is not an 8-bit grayscale or RGB PNG."""


class ImageIOError(PeelError, OSError):
    """Image file could not be read or written."""


class DimensionMismatchError(PeelError, ValueError):
    """Two rasters that must agree in shape do not."""


class ConfigError(PeelError, ValueError):
    """Invalid attack, run or inpainter configuration."""


class EmptyCorpusError(PeelError, ValueError):
    """An operation that averages over a corpus received none."""


class MetricDomainError(PeelError, ValueError):
    """Metric is undefined for the given inputs."""


class InpainterError(PeelError):
    """Base class for inpainter failures."""


class ExternalProcessError(InpainterError):
    """External inpainter exited with a non-zero status or could not start."""


class ExternalProtocolError(InpainterError):
    """External inpainter did not produce a valid result.png."""


class KeptPixelViolation(InpainterError):
    """Inpainter modified pixels outside the holes."""


class PhaseError(PeelError):
    """Inpainting failed during a scheduled removal phase."""

    def __init__(self, phase_index: int, cause: Optional[BaseException] = None):
        self.phase_index = phase_index
        self.cause = cause
        super().__init__(f"phase {phase_index} failed: {cause!r}")
