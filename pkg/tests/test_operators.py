import logging

import numpy as np
import pytest
import scipy.ndimage as ndi

from patchorder.operators import (BlurOperator, ComposedOperator, DownsampleOperator,
                                  IdentityOperator, Psf, add_gaussian_noise, bin_image,
                                  blur_scenario, downsample, gaussian_psf, make_psf,
                                  sample_poisson, unbin_upscale, uniform_psf, upsample_zero)


class TestPsf:
    def test_normalized(self):
        p = Psf(np.ones((3, 5)))
        assert p.kernel.sum() == pytest.approx(1.0, rel=1e-12)
        assert p.kernel.shape == (3, 5)

    def test_rejects_even_side(self):
        with pytest.raises(ValueError):
            Psf(np.ones((2, 3)))

    def test_rejects_zero_mass(self):
        with pytest.raises(ValueError):
            Psf(np.zeros((3, 3)))

    def test_gaussian_default_support(self):
        assert gaussian_psf(1.6).kernel.shape == (11, 11)
        assert gaussian_psf(0.4).kernel.shape == (3, 3)
        assert gaussian_psf(1.0, size=7).kernel.shape == (7, 7)

    def test_gaussian_symmetry_and_peak(self):
        k = gaussian_psf(1.3, size=9).kernel
        assert np.allclose(k, k.T)
        assert np.allclose(k, k[::-1, ::-1])
        assert k[4, 4] == k.max()


class TestBenchmarkKernels:
    def test_rational_kernel(self):
        k = make_psf(1).kernel
        assert k.shape == (15, 15)
        # h(x1, x2) = 1 / (1 + x1^2 + x2^2) on [-7, 7]^2, then normalized:
        # the center-to-corner ratio survives normalization
        assert k[7, 7] / k[0, 0] == pytest.approx(99.0, rel=1e-12)
        assert np.array_equal(make_psf(2).kernel, k)

    def test_uniform_kernel(self):
        k = make_psf(3).kernel
        assert k.shape == (9, 9)
        assert np.all(k == 1.0 / 81.0)

    def test_binomial_kernel(self):
        k = make_psf(4).kernel
        assert k.shape == (5, 5)
        assert k[2, 2] == pytest.approx(36.0 / 256.0, rel=1e-12)
        assert k[0, 0] == pytest.approx(1.0 / 256.0, rel=1e-12)

    def test_gaussian_scenarios(self):
        assert make_psf(5).kernel.shape == (25, 25)
        assert make_psf(6).kernel.shape == (3, 3)

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            make_psf(7)

    def test_noise_pairing(self):
        _, s4 = blur_scenario(4)
        assert s4 == pytest.approx(7.0)
        _, s3 = blur_scenario(3)
        assert s3 == pytest.approx(np.sqrt(0.3))


class TestBlurOperator:
    def test_matches_wrapped_convolution(self, rng):
        # an asymmetric kernel pins the orientation convention
        k = Psf(np.array([[0.0, 0.1, 0.0], [0.0, 0.5, 0.3], [0.0, 0.1, 0.0]]))
        x = rng.random((6, 7))
        op = BlurOperator(k, x.shape)
        assert np.allclose(op.forward(x), ndi.convolve(x, k.kernel, mode="wrap"), atol=1e-12)

    def test_matches_wrapped_convolution_benchmark(self, rng):
        x = rng.random((20, 20))
        for scenario in (1, 3, 4, 6):
            psf = make_psf(scenario)
            op = BlurOperator(psf, x.shape)
            assert np.allclose(op.forward(x), ndi.convolve(x, psf.kernel, mode="wrap"),
                               atol=1e-12)

    def test_adjoint_dot_identity(self, rng):
        op = BlurOperator(gaussian_psf(1.6, size=7), (12, 10))
        x, y = rng.standard_normal((12, 10)), rng.standard_normal((12, 10))
        lhs = float((op.forward(x) * y).sum())
        rhs = float((x * op.adjoint(y)).sum())
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_preserves_mean(self, rng):
        x = rng.random((8, 8))
        op = BlurOperator(make_psf(4), x.shape)
        assert op.forward(x).mean() == pytest.approx(x.mean(), rel=1e-12)

    def test_kernel_too_large(self):
        with pytest.raises(ValueError):
            BlurOperator(uniform_psf(9), (6, 6))


class TestDownsampleOperator:
    def test_forward_keeps_top_left_phase(self):
        x = np.arange(36, dtype=np.float64).reshape(6, 6)
        op = DownsampleOperator(3, (6, 6))
        assert np.array_equal(op.forward(x), x[::3, ::3])
        assert op.output_shape == (2, 2)

    def test_adjoint_zero_fills(self, rng):
        op = DownsampleOperator(2, (4, 6))
        y = rng.random((2, 3))
        up = op.adjoint(y)
        assert np.array_equal(up[::2, ::2], y)
        mask = np.ones((4, 6), dtype=bool)
        mask[::2, ::2] = False
        assert np.all(up[mask] == 0.0)

    def test_adjoint_dot_identity(self, rng):
        op = DownsampleOperator(3, (9, 12))
        x, y = rng.standard_normal((9, 12)), rng.standard_normal((3, 4))
        assert float((op.forward(x) * y).sum()) == pytest.approx(
            float((x * op.adjoint(y)).sum()), rel=1e-12)

    def test_rejects_indivisible_shape(self):
        with pytest.raises(ValueError):
            DownsampleOperator(3, (7, 9))


class TestComposedOperator:
    def make(self, shape=(12, 12)):
        blur = BlurOperator(gaussian_psf(1.6, size=7), shape)
        down = DownsampleOperator(3, shape)
        return ComposedOperator(down, blur)

    def test_forward_is_blur_then_decimate(self, rng):
        op = self.make()
        x = rng.random((12, 12))
        assert np.array_equal(op.forward(x), op.inner.forward(x)[::3, ::3])
        assert op.input_shape == (12, 12) and op.output_shape == (4, 4)

    def test_adjoint_dot_identity(self, rng):
        op = self.make()
        x, y = rng.standard_normal((12, 12)), rng.standard_normal((4, 4))
        assert float((op.forward(x) * y).sum()) == pytest.approx(
            float((x * op.adjoint(y)).sum()), rel=1e-12)

    def test_rejects_shape_mismatch(self):
        blur = BlurOperator(gaussian_psf(1.0, size=3), (8, 8))
        down = DownsampleOperator(3, (9, 9))
        with pytest.raises(ValueError):
            ComposedOperator(down, blur)


class TestIdentityOperator:
    def test_round_trip(self, rng):
        op = IdentityOperator((3, 4))
        x = rng.random((3, 4))
        assert np.array_equal(op.forward(x), x)
        assert np.array_equal(op.adjoint(x), x)
        assert op.forward(x) is not x


class TestResampling:
    def test_downsample_crops_with_warning(self, caplog):
        x = np.arange(35, dtype=np.float64).reshape(5, 7)
        with caplog.at_level(logging.WARNING):
            out = downsample(x, 3)
        assert out.shape == (1, 2)
        assert np.array_equal(out, x[:3, :6][::3, ::3])
        assert any("cropping" in r.message for r in caplog.records)

    def test_upsample_zero_matches_adjoint(self, rng):
        y = rng.random((2, 3))
        up = upsample_zero(y, 2, (4, 6))
        assert np.array_equal(up, DownsampleOperator(2, (4, 6)).adjoint(y))


class TestBinning:
    def test_exact_blocks(self):
        x = np.arange(36, dtype=np.float64).reshape(6, 6)
        b = bin_image(x, 3)
        assert b.shape == (2, 2)
        assert b[0, 0] == x[:3, :3].sum()
        assert b[1, 1] == x[3:, 3:].sum()

    def test_mirror_padded_blocks(self):
        x = np.arange(20, dtype=np.float64).reshape(4, 5)
        got = bin_image(x, 3)
        padded = np.pad(x, ((0, 2), (0, 1)), mode="symmetric")
        want = padded.reshape(2, 3, 2, 3).sum(axis=(1, 3))
        assert np.array_equal(got, want)

    def test_unbin_restores_constant(self):
        x = np.full((7, 8), 0.3)
        b = bin_image(x, 3)
        back = unbin_upscale(b, 3, (7, 8))
        assert back.shape == (7, 8)
        assert np.allclose(back, 0.3, atol=1e-12)

    def test_unbin_rejects_small_input(self):
        with pytest.raises(ValueError):
            unbin_upscale(np.ones((2, 2)), 2, (5, 5))


class TestNoise:
    def test_gaussian_noise_is_seeded_and_unclipped(self):
        img = np.full((200, 200), 0.95)
        a = add_gaussian_noise(img, 100.0, seed=7)
        b = add_gaussian_noise(img, 100.0, seed=7)
        c = add_gaussian_noise(img, 100.0, seed=8)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert a.max() > 1.0 and a.min() < 0.0
        noise = a - img
        assert noise.std() == pytest.approx(100.0 / 255.0, rel=0.02)
        assert noise.mean() == pytest.approx(0.0, abs=0.01)

    def test_poisson_counts(self):
        img = np.full((300, 300), 0.5)
        img[0, 0] = 1.0
        y = sample_poisson(img, peak=4.0, seed=3)
        assert y.dtype == np.float64
        assert np.all(y == np.rint(y)) and y.min() >= 0
        # max_pix defaults to the image maximum, so lambda = 2 on the flat part
        assert y[1:].mean() == pytest.approx(2.0, rel=0.02)
        assert np.array_equal(y, sample_poisson(img, 4.0, seed=3))

    def test_poisson_explicit_max_pix(self):
        img = np.full((200, 200), 0.25)
        y = sample_poisson(img, peak=8.0, seed=1, max_pix=1.0)
        assert y.mean() == pytest.approx(2.0, rel=0.05)

    def test_poisson_validation(self):
        with pytest.raises(ValueError):
            sample_poisson(-np.ones((2, 2)), 4.0, seed=0)
        with pytest.raises(ValueError):
            sample_poisson(np.zeros((2, 2)), 4.0, seed=0)
