"""
Tests for the inpainter contract, diffusion, edges, DR, the external
adapter and gamma estimation.
"""

import logging
import sys

import numpy as np
import pytest
from scipy import sparse
from scipy.sparse.linalg import spsolve

from core.errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyCorpusError,
    ExternalProcessError,
    ExternalProtocolError,
    KeptPixelViolation,
)
from schemas.attack import AttackConfig
from services.inpaint.contract import InpaintRequest, ZeroFillInpainter, check_kept_pixels, zero_fill
from services.inpaint.diffusion import DiffusionInpainter, diffusion_inpaint
from services.inpaint.edges import extract_edges
from services.inpaint.external import ExternalInpainter, external_inpaint
from services.inpaint.factory import make_inpainter
from services.inpaint.gamma import estimate_gamma, sample_grid_mask, sample_hole_box
from services.inpaint.side_channels import dr_matches_support, make_dr, masked_copy
from utils.image_buffer import ImageBuf
from utils.masks import RemovalMask

COPY_SCRIPT = """
import shutil, sys
from pathlib import Path
d = Path(sys.argv[1])
shutil.copy(d / "masked.png", d / "result.png")
"""

TAMPER_SCRIPT = """
import sys
from pathlib import Path
import numpy as np
from PIL import Image
d = Path(sys.argv[1])
a = np.array(Image.open(d / "masked.png")).astype(int)
a[0, 0] += 2
Image.fromarray(a.astype("uint8")).save(d / "result.png")
"""

SILENT_SCRIPT = "pass\n"
FAILING_SCRIPT = "import sys\nsys.exit(3)\n"


def box_request(img: ImageBuf, box, **extra) -> InpaintRequest:
    mask = RemovalMask.from_boxes(img.height, img.width, [box])
    return InpaintRequest(masked_copy(img, mask), mask, **extra)


def script_cmd(tmp_path, body: str) -> str:
    script = tmp_path / "tool.py"
    script.write_text(body)
    return f'"{sys.executable}" "{script}"'


def harmonic_oracle(data: np.ndarray, hole: np.ndarray) -> np.ndarray:
    """Direct sparse solve of the 4-neighbor Laplace equation on interior holes."""
    idx = -np.ones(hole.shape, dtype=int)
    ys, xs = np.nonzero(hole)
    idx[ys, xs] = np.arange(len(ys))
    rows, cols, vals = [], [], []
    rhs = np.zeros(len(ys))
    for n, (y, x) in enumerate(zip(ys, xs)):
        rows.append(n)
        cols.append(n)
        vals.append(4.0)
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            q = (y + dy, x + dx)
            if hole[q]:
                rows.append(n)
                cols.append(idx[q])
                vals.append(-1.0)
            else:
                rhs[n] += data[q]
    a = sparse.csr_matrix((vals, (rows, cols)), shape=(len(ys), len(ys)))
    out = data.copy()
    out[ys, xs] = spsolve(a, rhs)
    return out


class TestContract:
    """Test request validation and zero-fill."""

    def test_zero_fill_returns_masked(self, natural_image):
        """Test zero-fill is the identity on the masked image."""
        req = box_request(natural_image(16), (4, 10, 4, 10))
        assert zero_fill(req) is req.masked
        assert ZeroFillInpainter()(req) is req.masked

    def test_holes_must_be_zero(self, natural_image):
        """Test a masked image with content inside holes is refused."""
        img = natural_image(16)
        mask = RemovalMask.from_boxes(16, 16, [(4, 10, 4, 10)])
        with pytest.raises(ValueError):
            InpaintRequest(img, mask)

    def test_shape_checks(self, natural_image):
        """Test mask, edge and dr must match the image."""
        img = natural_image(16)
        mask = RemovalMask.from_boxes(16, 16, [(4, 10, 4, 10)])
        masked = masked_copy(img, mask)
        with pytest.raises(DimensionMismatchError):
            InpaintRequest(masked, RemovalMask.full(8, 8))
        with pytest.raises(DimensionMismatchError):
            InpaintRequest(masked, mask, edge=np.zeros((4, 4), dtype=bool))
        with pytest.raises(ValueError):
            InpaintRequest(masked, mask, dr=img)

    def test_kept_pixel_check(self, natural_image):
        """Test moved kept pixels raise KeptPixelViolation."""
        req = box_request(natural_image(16), (4, 10, 4, 10))
        data = req.masked.copy_data()
        data[0, 0, 0] = 1.0 - data[0, 0, 0]
        with pytest.raises(KeptPixelViolation):
            check_kept_pixels(req, ImageBuf(data))


class TestDiffusion:
    """Test harmonic inpainting."""

    def test_constant_is_reproduced(self):
        """Test a constant image is filled with the same constant."""
        img = ImageBuf(np.full((24, 24, 3), 0.5))
        out = DiffusionInpainter()(box_request(img, (5, 15, 6, 18)))
        assert np.allclose(out.data, 0.5, atol=1e-12)

    @pytest.mark.parametrize("method", ["sor", "jacobi"])
    def test_matches_sparse_solve(self, natural_image, method):
        """Test the iterative solve agrees with a direct sparse solve."""
        img = natural_image(32, seed=3, channels=1)
        hole = np.zeros((32, 32), dtype=bool)
        hole[8:20, 10:22] = True
        req = box_request(img, (8, 20, 10, 22))
        result = diffusion_inpaint(req, max_iters=200000, tol=1e-10, method=method)
        expected = harmonic_oracle(img.data[:, :, 0], hole)
        assert result.converged
        assert np.allclose(result.image.data[:, :, 0], expected, atol=1e-6)

    def test_maximum_principle(self, natural_image):
        """Test hole values stay within the range of the kept boundary."""
        img = natural_image(32, seed=4, channels=1)
        req = box_request(img, (6, 26, 6, 26))
        out = diffusion_inpaint(req, max_iters=50000, tol=1e-9, method="jacobi").image.data
        ring = img.data[5:27, 5:27].copy()
        ring[1:-1, 1:-1] = np.nan
        assert out[6:26, 6:26].min() >= np.nanmin(ring) - 1e-9
        assert out[6:26, 6:26].max() <= np.nanmax(ring) + 1e-9

    def test_edge_barrier(self):
        """Test an edge column stops diffusion across a step."""
        data = np.where(np.arange(40)[None, :] < 20, 0.2, 0.8) * np.ones((40, 1))
        img = ImageBuf(data)
        edge = np.zeros((40, 40), dtype=bool)
        edge[:, 20] = True
        req = box_request(img, (10, 30, 10, 30), edge=edge)
        out = diffusion_inpaint(req, max_iters=100000, tol=1e-10).image.data[:, :, 0]
        assert np.allclose(out[10:30, 10:20], 0.2, atol=1e-6)
        assert np.allclose(out[10:30, 20:30], 0.8, atol=1e-6)

    def test_dr_blend(self):
        """Test the hole result is 0.7 * harmonic + 0.3 * dr."""
        img = ImageBuf(np.full((20, 20, 1), 0.5))
        mask = RemovalMask.from_boxes(20, 20, [(5, 15, 5, 15)])
        dr = ImageBuf(np.where(mask.holes[:, :, None], 0.9, 0.0))
        req = InpaintRequest(masked_copy(img, mask), mask, dr=dr)
        out = diffusion_inpaint(req, max_iters=100000, tol=1e-12).image.data
        assert np.allclose(out[5:15, 5:15], 0.62, atol=1e-6)

    def test_non_convergence_reported(self, natural_image):
        """Test hitting the iteration cap is reported."""
        req = box_request(natural_image(32, seed=5), (4, 28, 4, 28))
        result = diffusion_inpaint(req, max_iters=1, tol=1e-12)
        assert not result.converged
        assert result.iterations == 1

    def test_kept_pixels_untouched(self, natural_image):
        """Test kept pixels are bit-identical after inpainting."""
        req = box_request(natural_image(32, seed=6), (0, 12, 20, 32))
        out = DiffusionInpainter()(req)
        keep = req.mask.keep
        assert np.array_equal(out.data[keep], req.masked.data[keep])

    def test_unknown_method(self, natural_image):
        """Test unknown iteration methods are refused."""
        with pytest.raises(ConfigError):
            diffusion_inpaint(box_request(natural_image(8), (2, 4, 2, 4)), method="multigrid")


class TestEdges:
    """Test Canny edge extraction."""

    def test_constant_has_no_edges(self):
        """Test a flat image yields an empty map."""
        assert not extract_edges(ImageBuf(np.full((20, 20), 0.3))).any()

    def test_vertical_step(self):
        """Test a step at x=20 gives one edge pixel per row at column 19 or 20."""
        data = np.where(np.arange(40)[None, :] < 20, 0.0, 1.0) * np.ones((40, 1))
        edges = extract_edges(ImageBuf(data))
        for row in edges:
            cols = np.nonzero(row)[0]
            assert len(cols) == 1
            assert cols[0] in (19, 20)

    def test_thresholds_checked(self, natural_image):
        """Test lo >= hi and negative lo are refused."""
        with pytest.raises(ConfigError):
            extract_edges(natural_image(16), lo=0.3, hi=0.2)
        with pytest.raises(ConfigError):
            extract_edges(natural_image(16), lo=-0.1, hi=0.2)

    def test_deterministic(self, natural_image):
        """Test repeated calls give identical maps."""
        img = natural_image(48, seed=7)
        assert np.array_equal(extract_edges(img), extract_edges(img))


class TestDr:
    """Test the distorted-region side channel."""

    def test_support_and_values(self, natural_image):
        """Test DR is zero on kept pixels and near the container on holes."""
        img = natural_image(32, seed=8)
        mask = RemovalMask.from_boxes(32, 32, [(8, 20, 8, 20)])
        dr = make_dr(img, mask, 0.05, 1)
        assert dr_matches_support(dr, mask)
        assert np.abs(dr.data[mask.holes] - img.data[mask.holes]).mean() < 0.06

    def test_zero_delta_warns(self, natural_image, caplog):
        """Test delta=0 copies the hole content and logs a warning."""
        img = natural_image(16)
        mask = RemovalMask.from_boxes(16, 16, [(4, 8, 4, 8)])
        with caplog.at_level(logging.WARNING):
            dr = make_dr(img, mask, 0.0, 1)
        assert np.array_equal(dr.data[mask.holes], img.data[mask.holes])
        assert "delta=0" in caplog.text

    def test_seeded(self, natural_image):
        """Test DR depends only on the seed."""
        img = natural_image(16)
        mask = RemovalMask.from_boxes(16, 16, [(4, 8, 4, 8)])
        assert np.array_equal(make_dr(img, mask, 0.1, 5).data, make_dr(img, mask, 0.1, 5).data)
        assert not np.array_equal(make_dr(img, mask, 0.1, 5).data, make_dr(img, mask, 0.1, 6).data)

    def test_negative_delta(self, natural_image):
        """Test negative delta is refused."""
        img = natural_image(8)
        with pytest.raises(ConfigError):
            make_dr(img, RemovalMask.full(8, 8), -1.0, 0)


class TestExternal:
    """Test the subprocess inpainter adapter."""

    def make_request(self):
        img = ImageBuf(np.full((12, 12, 3), 0.5))
        return box_request(img, (4, 8, 4, 8), edge=np.zeros((12, 12), dtype=bool))

    def test_copy_through(self, tmp_path):
        """Test a tool that returns masked.png satisfies the protocol."""
        req = self.make_request()
        out = ExternalInpainter(script_cmd(tmp_path, COPY_SCRIPT))(req)
        assert np.array_equal(out.to_bytes(), req.masked.to_bytes())

    def test_missing_result(self, tmp_path):
        """Test a tool that writes nothing raises ExternalProtocolError."""
        with pytest.raises(ExternalProtocolError):
            external_inpaint(script_cmd(tmp_path, SILENT_SCRIPT), self.make_request())

    def test_tampered_kept_pixels(self, tmp_path):
        """Test a kept pixel moved by two levels raises KeptPixelViolation."""
        with pytest.raises(KeptPixelViolation):
            external_inpaint(script_cmd(tmp_path, TAMPER_SCRIPT), self.make_request())

    def test_nonzero_exit(self, tmp_path):
        """Test a failing tool raises ExternalProcessError."""
        with pytest.raises(ExternalProcessError):
            external_inpaint(script_cmd(tmp_path, FAILING_SCRIPT), self.make_request())

    def test_missing_binary(self):
        """Test an unknown executable raises ExternalProcessError."""
        with pytest.raises(ExternalProcessError):
            external_inpaint("no-such-inpainter-binary-xyz", self.make_request())


class TestGamma:
    """Test empirical gamma estimation."""

    def test_zero_on_black_corpus(self):
        """Test zero-fill on black images has gamma 0."""
        corpus = [ImageBuf(np.zeros((40, 40, 1)))]
        assert estimate_gamma(ZeroFillInpainter(), corpus, 10, 5) == 0.0

    def test_zero_fill_on_flat_gray(self):
        """Test zero-fill of a 10x10 hole in a 40x40 0.5 image gives 0.125."""
        corpus = [ImageBuf(np.full((40, 40, 1), 0.5))]
        assert estimate_gamma(ZeroFillInpainter(), corpus, 10, 3) == pytest.approx(0.125)

    def test_diffusion_beats_zero_fill(self, natural_corpus):
        """Test diffusion repairs holes better than zero-fill."""
        zero = estimate_gamma(ZeroFillInpainter(), natural_corpus, 12, 8, seed=1)
        diff = estimate_gamma(DiffusionInpainter(), natural_corpus, 12, 8, seed=1)
        assert diff < zero

    def test_side_channels_and_alignment(self, natural_corpus):
        """Test aligned holes with edge and DR inputs are reproducible."""
        kwargs = dict(aligned_k=16, use_edge=True, use_dr=True, seed=4)
        a = estimate_gamma(DiffusionInpainter(), natural_corpus, 20, 4, **kwargs)
        b = estimate_gamma(DiffusionInpainter(), natural_corpus, 20, 4, **kwargs)
        assert a == b

    def test_invalid_inputs(self):
        """Test empty corpora, zero trials and oversized holes are refused."""
        img = ImageBuf(np.zeros((10, 10)))
        with pytest.raises(EmptyCorpusError):
            estimate_gamma(ZeroFillInpainter(), [], 4, 1)
        with pytest.raises(ConfigError):
            estimate_gamma(ZeroFillInpainter(), [img], 4, 0)
        with pytest.raises(ConfigError):
            sample_hole_box(10, 10, 11, np.random.default_rng(0))

    def test_grid_mask(self):
        """Test sampled grid masks cover every cell when count reaches the cell total."""
        rng = np.random.default_rng(0)
        one = sample_grid_mask(40, 40, 10, 14, rng)
        every = sample_grid_mask(40, 40, 10, 14, rng, count=100)
        assert 144 <= one.removed_count <= 196
        assert every.removed_count == 1600


class TestFactory:
    """Test inpainter selection."""

    def test_ids(self, tmp_path):
        """Test each id builds the matching inpainter."""
        assert make_inpainter(AttackConfig(k=10, l=14, inpainter="zero")).name == "zero"
        diffusion = make_inpainter(AttackConfig(k=10, l=14))
        assert diffusion.name == "diffusion"
        assert diffusion.max_iters == 10 * 14 * 14
        external = make_inpainter(AttackConfig(k=10, l=14, inpainter="external", external_cmd="tool"))
        assert external.name == "external"

    def test_external_without_command(self):
        """Test 'external' without a command raises ConfigError."""
        cfg = AttackConfig.model_construct(k=10, l=14, inpainter="external", external_cmd=None)
        with pytest.raises(ConfigError):
            make_inpainter(cfg)
