"""
Tests for the locality, redundancy and removal-leakage probes.
"""

import numpy as np
import pytest

from core.errors import ConfigError
from schemas.attack import AttackConfig
from services.hiding.oracles import LsbScheme, SpreadScheme, quantize_bits
from services.hiding.probes import (
    damage_container,
    footprint,
    locality_probe,
    redundancy_probe,
    removal_leakage,
)


class TestLocalityProbe:
    """Test region damage against the scheme footprint."""

    @pytest.mark.parametrize("scheme", [LsbScheme(4), SpreadScheme(1, 4)])
    def test_remove_stays_in_footprint(self, random_image, scheme):
        """Test removing a region breaks nothing outside its dilation."""
        c, s = random_image(32, seed=1), random_image(32, seed=2)
        _, in_err, out_err = locality_probe(scheme, c, s, (8, 10, 9, 7), "remove")
        assert in_err > 0.0
        assert out_err == 0.0

    @pytest.mark.parametrize("scheme", [LsbScheme(4), SpreadScheme(1, 4)])
    def test_keep_only_preserves_interior(self, random_image, scheme):
        """Test keeping a region preserves every secret pixel stored inside it."""
        c, s = random_image(32, seed=3), random_image(32, seed=4)
        _, in_err, out_err = locality_probe(scheme, c, s, (8, 8, 12, 12), "keep_only")
        assert in_err == 0.0
        assert out_err > 0.0

    def test_damage_modes(self, random_image):
        """Test remove and keep_only zero complementary regions."""
        img = random_image(10, seed=5)
        removed = damage_container(img, (2, 3, 4, 5), "remove").data
        kept = damage_container(img, (2, 3, 4, 5), "keep_only").data
        assert not removed[3:8, 2:6].any()
        assert not kept[0:3].any()
        assert np.array_equal(removed + kept, img.data)

    def test_footprint_shapes(self):
        """Test dilation and erosion sizes of the footprint."""
        assert footprint(20, 20, (5, 5, 6, 6), 1, "remove").sum() == 64
        assert footprint(20, 20, (5, 5, 6, 6), 1, "keep_only").sum() == 16
        assert footprint(20, 20, (5, 5, 2, 2), 1, "keep_only").sum() == 0

    def test_rect_outside_image(self, random_image):
        """Test out-of-bounds rects raise ConfigError."""
        with pytest.raises(ConfigError):
            damage_container(random_image(8), (6, 6, 4, 4), "remove")
        with pytest.raises(ConfigError):
            damage_container(random_image(8), (1, 1, 2, 2), "smudge")


class TestRedundancyProbe:
    """Test single-pixel changes."""

    def test_lsb_exhaustive(self, random_image):
        """Test zeroing one LSB pixel affects it iff its revealed value is nonzero."""
        scheme = LsbScheme(4)
        c, s = random_image(16, seed=6), random_image(16, seed=7)
        top = quantize_bits(s, 4).to_bytes()
        for y in range(16):
            for x in range(16):
                expected = int(top[y, x].any())
                assert redundancy_probe(scheme, c, s, (x, y), 0.0) == expected

    def test_same_value_changes_nothing(self, random_image):
        """Test rewriting a pixel with its own value affects nothing."""
        scheme = SpreadScheme(1, 4)
        c, s = random_image(16, seed=8), random_image(16, seed=9)
        c_prime = scheme.hide(c, s)
        v = c_prime.data[5, 6, :].tolist()
        assert redundancy_probe(scheme, c, s, (6, 5), v) == 0

    def test_spread_bounded(self, random_image):
        """Test one spread pixel touches at most `bits` revealed pixels."""
        scheme = SpreadScheme(1, 4)
        c, s = random_image(16, seed=10), random_image(16, seed=11)
        for pos in [(0, 0), (7, 7), (15, 3), (8, 15)]:
            assert redundancy_probe(scheme, c, s, pos, 1.0) <= 4

    def test_position_outside(self, random_image):
        """Test positions off the image raise ConfigError."""
        with pytest.raises(ConfigError):
            redundancy_probe(LsbScheme(4), random_image(8), random_image(8), (8, 0), 0.0)


class TestRemovalLeakage:
    """Test what each attack phase leaves of a cell's secret."""

    def test_margin_hides_every_slot(self, random_image):
        """Test a margin of at least r leaves no slot and chance agreement."""
        scheme = SpreadScheme(1, 4)
        c, s = random_image(32, seed=12), random_image(32, seed=13)
        report = removal_leakage(scheme, c, s, AttackConfig(k=8, l=10))
        assert report.surviving_slots == 0
        assert abs(report.agreement - 0.5) < 0.02

    def test_no_margin_leaks(self, random_image):
        """Test l == k lets boundary bits survive into the inpainter input."""
        scheme = SpreadScheme(1, 4)
        c, s = random_image(32, seed=12), random_image(32, seed=13)
        leaky = removal_leakage(scheme, c, s, AttackConfig.model_construct(k=8, l=8))
        safe = removal_leakage(scheme, c, s, AttackConfig(k=8, l=10))
        assert leaky.surviving_slots > 0
        assert leaky.agreement > safe.agreement

    def test_peelo_phases(self, random_image):
        """Test the PEEL-O schedule is equally sealed."""
        scheme = SpreadScheme(1, 4)
        c, s = random_image(32, seed=14), random_image(32, seed=15)
        report = removal_leakage(scheme, c, s, AttackConfig(k=8, l=10, d=1), mode="peelo")
        assert report.surviving_slots == 0
        assert report.total_bits == 32 * 32 * 3 * 4
