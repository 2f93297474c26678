"""
Tests for the gamma -> epsilon bound and the empirical certifier.
"""

import math

import numpy as np
import pytest

from core.errors import ConfigError, EmptyCorpusError
from schemas.attack import AttackConfig
from services.hiding.oracles import LsbScheme, quantize_bits
from services.inpaint.factory import make_inpainter
from services.inpaint.gamma import estimate_gamma
from services.metrics_service import rmse
from services.theory_service import certify_attack, check_theorem, epsilon_bound
from utils.image_buffer import ImageBuf


class CrashingInpainter:
    name = "crashing"

    def __call__(self, req):
        raise RuntimeError("no model loaded")


@pytest.fixture
def pairs(natural_image, random_image):
    return [(natural_image(64, seed=i), random_image(64, seed=50 + i)) for i in range(3)]


class TestEpsilonBound:
    """Test the bound arithmetic."""

    def test_hand_computed_values(self):
        """Test the PEEL and PEEL-O canvases."""
        assert epsilon_bound(0.0, 275, 25) == 0.0
        assert epsilon_bound(0.001, 275, 25) == pytest.approx(0.12)
        assert epsilon_bound(0.01, 300, 50) == pytest.approx(0.35)

    def test_rectangular_canvas(self):
        """Test K_h enters as (K/k)(K_h/k) - 1."""
        assert epsilon_bound(0.1, 60, 20, K_h=40) == pytest.approx(0.5)

    def test_invalid_geometry(self):
        """Test non-multiples and single-cell canvases are refused."""
        with pytest.raises(ConfigError):
            epsilon_bound(0.1, 100, 30)
        with pytest.raises(ConfigError):
            epsilon_bound(0.1, 25, 25)

    def test_linear_and_monotone(self):
        """Test linearity in gamma and growth with K/k."""
        for K in range(20, 110, 10):
            assert epsilon_bound(0.3, K, 10) == pytest.approx(
                epsilon_bound(0.1, K, 10) + epsilon_bound(0.2, K, 10)
            )
        bounds = [epsilon_bound(0.01, K, 10) for K in range(20, 110, 10)]
        assert all(a < b for a, b in zip(bounds, bounds[1:]))


class TestCheckTheorem:
    """Test the non-strict hypothesis check."""

    def test_zero_gamma(self):
        """Test gamma 0 satisfies any epsilon."""
        assert check_theorem(0.0, 0.0, 100, 10)

    def test_equality_holds(self):
        """Test gamma exactly at the bound passes."""
        assert check_theorem(0.01, 0.35, 300, 50)
        assert check_theorem(0.001, epsilon_bound(0.001, 275, 25), 275, 25)

    def test_just_above_fails(self):
        """Test gamma slightly over the bound fails."""
        assert not check_theorem(0.0100001, 0.35, 300, 50)

    def test_float_rounding_is_not_forgiven(self):
        """Test a gamma whose product only rounds down onto epsilon fails."""
        assert not check_theorem(0.006369616873214545, 0.7643540247857452, 275, 25)

    def test_bound_always_passes(self):
        """Test epsilon_bound output satisfies the check for its own gamma."""
        assert epsilon_bound(0.001, 275, 25) == 0.12
        rng = np.random.default_rng(5)
        for gamma in rng.random(2000) * 0.01:
            gamma = float(gamma)
            assert check_theorem(gamma, epsilon_bound(gamma, 275, 25), 275, 25)
            assert check_theorem(gamma, epsilon_bound(gamma, 300, 50, K_h=150), 300, 50, K_h=150)


class TestCertify:
    """Test empirical certificates."""

    def test_noop_attack(self, pairs):
        """Test the identity attack has zero epsilon and lambda."""
        cert = certify_attack(LsbScheme(4), "none", AttackConfig(k=16, l=20), pairs)
        assert cert.epsilon_hat == 0.0 and cert.lambda_hat == 0.0
        assert cert.gamma_hat == 0.0 and cert.bound_ok is None
        assert cert.n_images == 3

    def test_zero_fill_lambda_closed_form(self, pairs):
        """Test zero-fill PEEL lambda equals the distance of each clean reveal to black."""
        cfg = AttackConfig(k=16, l=20, inpainter="zero")
        cert = certify_attack(LsbScheme(4), "peel", cfg, pairs, gamma_trials=3)
        black = ImageBuf(np.zeros((64, 64, 3)))
        expected = sum(rmse(quantize_bits(s, 4), black) for _, s in pairs) / len(pairs)
        assert cert.lambda_hat == pytest.approx(expected, rel=1e-12)
        assert cert.lambda_hat > 0.0
        assert (cert.K, cert.K_h, cert.k) == (64, 64, 16)

    def test_bound_ok(self, pairs):
        """Test bound_ok follows the epsilon target."""
        cfg = AttackConfig(k=16, l=20, inpainter="zero")
        loose = certify_attack(LsbScheme(4), "peel", cfg, pairs, gamma_trials=3, epsilon_target=10.0)
        tight = certify_attack(LsbScheme(4), "peel", cfg, pairs, gamma_trials=3, epsilon_target=0.0)
        assert loose.bound_ok is True
        assert tight.bound_ok is False
        assert loose.epsilon_bound == pytest.approx(15 * loose.gamma_hat)

    def test_deterministic(self, pairs):
        """Test repeated certification gives identical certificates."""
        cfg = AttackConfig(k=16, l=20, d=1, use_edge=True, use_dr=True, seed=7)
        a = certify_attack(LsbScheme(4), "peelo", cfg, pairs, gamma_trials=3)
        b = certify_attack(LsbScheme(4), "peelo", cfg, pairs, gamma_trials=3)
        assert a.model_dump() == b.model_dump()

    def test_gamma_uses_attack_side_channels(self, pairs):
        """Test gamma_hat is measured with the edge and DR inputs the attack feeds its inpainter."""
        cfg = AttackConfig(k=16, l=20, d=1, use_edge=True, use_dr=True, delta=0.05, seed=7)
        cert = certify_attack(LsbScheme(4), "peelo", cfg, pairs, gamma_trials=3)
        containers = [LsbScheme(4).hide(c, s) for c, s in pairs]
        direct = estimate_gamma(
            make_inpainter(cfg), containers, cfg.l, 3, seed=cfg.seed,
            use_edge=True, use_dr=True, delta=0.05,
        )
        plain = estimate_gamma(make_inpainter(cfg), containers, cfg.l, 3, seed=cfg.seed)
        assert cert.gamma_hat == direct
        assert cert.gamma_hat != plain

    def test_small_images_skip_vif(self, random_image):
        """Test VIF means are NaN below the VIF size limit."""
        small = [(random_image(16, seed=1), random_image(16, seed=2))]
        cert = certify_attack(LsbScheme(4), "none", AttackConfig(), small)
        assert math.isnan(cert.vif_c_mean)

    def test_failures(self, pairs):
        """Test an attack failing on every pair raises EmptyCorpusError."""
        cfg = AttackConfig(k=16, l=20)
        with pytest.raises(EmptyCorpusError):
            certify_attack(LsbScheme(4), "peel", cfg, pairs, inpainter=CrashingInpainter())

    def test_empty_corpus(self):
        """Test an empty corpus is refused."""
        with pytest.raises(EmptyCorpusError):
            certify_attack(LsbScheme(4), "none", AttackConfig(), [])

    @pytest.mark.slow
    def test_bound_direction(self, pairs):
        """Test diffusion PEEL stays within the epsilon bound of its own gamma."""
        cfg = AttackConfig(k=16, l=20)
        cert = certify_attack(LsbScheme(4), "peel", cfg, pairs, gamma_trials=10)
        assert cert.gamma_hat > 0.0
        assert cert.epsilon_hat <= cert.epsilon_bound
