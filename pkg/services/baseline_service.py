"""
Whole-image distortion baselines: Gaussian noise, Gaussian blur, median blur.
"""

from core import settings
from utils.filters import add_gaussian_noise, gaussian_blur, median_blur
from utils.image_buffer import ImageBuf


def gn_attack(c_prime: ImageBuf, delta: float, seed: int) -> ImageBuf:
    return add_gaussian_noise(c_prime, delta, seed)


def gb_attack(c_prime: ImageBuf) -> ImageBuf:
    return gaussian_blur(c_prime, settings.GB_KSIZE, settings.GB_SIGMA)


def mb_attack(c_prime: ImageBuf) -> ImageBuf:
    return median_blur(c_prime, settings.MB_KSIZE)
