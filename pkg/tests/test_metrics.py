"""
Tests for RMSE, PSNR, VIF and the C/S report conventions.
"""

import math

import numpy as np
import pytest

from core.errors import ConfigError, DimensionMismatchError, EmptyCorpusError, MetricDomainError
from schemas.report import MetricRecord
from services.baseline_service import gn_attack
from services.metrics_service import aggregate, get_distance, mae, psnr, report_pair, rmse, vif
from utils.image_buffer import ImageBuf


def shrink(img: ImageBuf) -> ImageBuf:
    """Map values into [0.1, 0.9] so a 0.1 offset never clips."""
    return ImageBuf(0.1 + 0.8 * img.data)


class TestRmse:
    """Test the theory-facing norm."""

    def test_identity(self, natural_image):
        """Test rmse(a, a) == 0."""
        img = natural_image(16)
        assert rmse(img, img) == 0.0

    def test_constant_offset(self, natural_image):
        """Test a +0.1 offset gives rmse 0.1."""
        a = shrink(natural_image(16))
        b = ImageBuf(a.data + 0.1)
        assert rmse(a, b) == pytest.approx(0.1, abs=1e-12)

    def test_triangle_inequality(self):
        """Test the triangle inequality on 1000 random triples."""
        rng = np.random.default_rng(0)
        for _ in range(1000):
            a, b, c = (ImageBuf(rng.random((6, 6, 3))) for _ in range(3))
            assert rmse(a, c) <= rmse(a, b) + rmse(b, c) + 1e-12

    def test_homogeneity(self, random_image):
        """Test scaling both images scales the distance."""
        a, b = random_image(8, seed=1), random_image(8, seed=2)
        scaled = rmse(ImageBuf(0.5 * a.data), ImageBuf(0.5 * b.data))
        assert scaled == pytest.approx(0.5 * rmse(a, b), rel=1e-12)

    def test_shape_mismatch(self, random_image):
        """Test differing shapes raise DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            rmse(random_image(8), random_image(9))


class TestPsnr:
    """Test the reporting PSNR."""

    def test_offset_is_20db(self, natural_image):
        """Test a 0.1 offset gives 20 dB."""
        a = shrink(natural_image(16))
        assert psnr(a, ImageBuf(a.data + 0.1)) == pytest.approx(20.0, abs=1e-9)

    def test_identical_is_inf(self, natural_image):
        """Test identical images give +inf."""
        img = natural_image(16)
        assert psnr(img, img) == math.inf

    def test_inverted_binary_is_0db(self):
        """Test b = 1 - a on a binary image gives 0 dB."""
        a = ImageBuf(np.indices((8, 8)).sum(axis=0) % 2 * 1.0)
        assert psnr(a, ImageBuf(1.0 - a.data)) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric(self, random_image):
        """Test psnr(a, b) == psnr(b, a)."""
        a, b = random_image(8, seed=3), random_image(8, seed=4)
        assert psnr(a, b) == psnr(b, a)


class TestVif:
    """Test pixel-domain multiscale VIF."""

    def test_self_score(self, natural_image):
        """Test vif(x, x) == 1 on 100 random crops."""
        big = natural_image(128, seed=9)
        rng = np.random.default_rng(1)
        for _ in range(100):
            y, x = rng.integers(0, 128 - 40, size=2)
            crop = ImageBuf(big.data[y : y + 40, x : x + 40])
            assert vif(crop, crop) == pytest.approx(1.0, abs=1e-6)

    def test_monotone_in_noise(self, natural_image):
        """Test more white noise gives lower VIF."""
        img = natural_image(64, seed=10)
        scores = [vif(img, gn_attack(img, delta, 5)) for delta in (0.01, 0.05, 0.1)]
        assert scores[0] > scores[1] > scores[2]

    def test_constant_distortion(self, natural_image):
        """Test a constant distorted image carries no information."""
        img = natural_image(64, seed=11)
        assert vif(img, ImageBuf(np.full(img.shape, 0.5))) < 1e-6

    def test_too_small(self, natural_image):
        """Test images below 32 pixels per side are refused."""
        img = natural_image(16)
        with pytest.raises(MetricDomainError):
            vif(img, img)

    def test_flat_reference(self, natural_image):
        """Test a flat reference is 1 for an identical pair and an error otherwise."""
        flat = ImageBuf(np.full((40, 40, 3), 0.3))
        assert vif(flat, flat) == 1.0
        with pytest.raises(MetricDomainError):
            vif(flat, natural_image(40))


class TestReporting:
    """Test C/S records and aggregation."""

    def test_noop_record(self, natural_image):
        """Test a no-op attack gives inf PSNR and unit VIF on both sides."""
        c, s = natural_image(48, seed=1), natural_image(48, seed=2)
        record = report_pair(c, c, s, s)
        assert record.psnr_c == math.inf and record.psnr_s == math.inf
        assert record.vif_c == pytest.approx(1.0, abs=1e-6)
        assert record.vif_s == pytest.approx(1.0, abs=1e-6)
        assert record.rmse_c == 0.0 and record.rmse_s == 0.0

    def test_aggregate_means(self):
        """Test aggregation averages each column and propagates inf."""
        a = MetricRecord(psnr_c=10, psnr_s=math.inf, vif_c=0.5, vif_s=1.0, rmse_c=0.1, rmse_s=0.0)
        b = MetricRecord(psnr_c=20, psnr_s=30, vif_c=0.7, vif_s=0.2, rmse_c=0.3, rmse_s=0.2)
        mean = aggregate([a, b])
        assert mean.psnr_c == pytest.approx(15.0)
        assert mean.psnr_s == math.inf
        assert mean.vif_s == pytest.approx(0.6)
        assert mean.rmse_c == pytest.approx(0.2)

    def test_aggregate_empty(self):
        """Test aggregating nothing raises EmptyCorpusError."""
        with pytest.raises(EmptyCorpusError):
            aggregate([])

    def test_distance_lookup(self, random_image):
        """Test distance ids resolve and unknown ids fail."""
        a, b = random_image(8, seed=5), random_image(8, seed=6)
        assert get_distance("rmse")(a, b) == rmse(a, b)
        assert get_distance("mae")(a, b) == mae(a, b)
        with pytest.raises(ConfigError):
            get_distance("psnr")
