"""Degradation operators and noise synthesis.

Blur is circular (periodic boundary) convolution evaluated through the FFT,
decimation keeps the top-left pixel of each factor x factor cell, and the two
compose for super-resolution.  Every operator exposes ``forward`` and the
exact ``adjoint`` so data terms can form gradients without approximation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .image import as_image

__all__ = [
    "Psf",
    "gaussian_psf",
    "uniform_psf",
    "make_psf",
    "blur_scenario",
    "IdentityOperator",
    "BlurOperator",
    "DownsampleOperator",
    "ComposedOperator",
    "downsample",
    "upsample_zero",
    "bin_image",
    "unbin_upscale",
    "add_gaussian_noise",
    "sample_poisson",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Psf:
    """A normalized point spread function with odd side lengths."""

    kernel: np.ndarray

    def __post_init__(self):
        k = as_image(self.kernel)
        if k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
            raise ValueError("kernel sides must be odd")
        s = k.sum()
        if not s > 0:
            raise ValueError("kernel must have positive mass")
        object.__setattr__(self, "kernel", k / s)


def gaussian_psf(std: float, size: int | None = None) -> Psf:
    """Isotropic Gaussian kernel; support defaults to ceil(6 * std), odd, >= 3."""
    if size is None:
        size = max(3, int(np.ceil(6.0 * std)))
        if size % 2 == 0:
            size += 1
    r = (size - 1) // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    return Psf(np.exp(-(xx * xx + yy * yy) / (2.0 * std * std)))


def uniform_psf(size: int) -> Psf:
    return Psf(np.ones((size, size), dtype=np.float64))


def make_psf(scenario: int) -> Psf:
    """Standard benchmark blur kernels, numbered 1 to 6."""
    if scenario in (1, 2):
        ax = np.arange(-7, 8, dtype=np.float64)
        xx, yy = np.meshgrid(ax, ax, indexing="ij")
        return Psf(1.0 / (1.0 + xx * xx + yy * yy))
    if scenario == 3:
        return uniform_psf(9)
    if scenario == 4:
        row = np.array([1.0, 4.0, 6.0, 4.0, 1.0])
        return Psf(np.outer(row, row) / 256.0)
    if scenario == 5:
        return gaussian_psf(1.6, size=25)
    if scenario == 6:
        return gaussian_psf(0.4)
    raise ValueError(f"unknown blur scenario {scenario}")


#: Gaussian noise variance paired with each blur scenario, on the 0-255 scale.
_SCENARIO_NOISE_VAR = {1: 2.0, 2: 8.0, 3: 0.3, 4: 49.0, 5: 4.0, 6: 64.0}


def blur_scenario(scenario: int) -> tuple[Psf, float]:
    """Kernel and noise standard deviation (0-255 scale) of a benchmark scenario."""
    return make_psf(scenario), float(np.sqrt(_SCENARIO_NOISE_VAR[scenario]))


class IdentityOperator:
    def __init__(self, shape):
        self.input_shape = tuple(shape)
        self.output_shape = tuple(shape)

    def forward(self, x):
        return as_image(x).copy()

    def adjoint(self, y):
        return as_image(y).copy()


class BlurOperator:
    """Circular convolution with a PSF, via the FFT."""

    def __init__(self, psf: Psf, shape):
        h, w = shape
        kh, kw = psf.kernel.shape
        if kh > h or kw > w:
            raise ValueError("kernel larger than the image")
        self.input_shape = (h, w)
        self.output_shape = (h, w)
        self.psf = psf
        embedded = np.zeros((h, w), dtype=np.float64)
        embedded[:kh, :kw] = psf.kernel
        embedded = np.roll(embedded, (-(kh // 2), -(kw // 2)), axis=(0, 1))
        self._otf = np.fft.rfft2(embedded)

    def forward(self, x):
        x = as_image(x)
        return np.fft.irfft2(np.fft.rfft2(x) * self._otf, s=self.input_shape)

    def adjoint(self, y):
        y = as_image(y)
        return np.fft.irfft2(np.fft.rfft2(y) * np.conj(self._otf), s=self.input_shape)


class DownsampleOperator:
    """Keep every factor-th pixel starting at the top-left corner."""

    def __init__(self, factor: int, input_shape):
        h, w = input_shape
        if h % factor or w % factor:
            raise ValueError("input dimensions must be divisible by the factor")
        self.factor = factor
        self.input_shape = (h, w)
        self.output_shape = (h // factor, w // factor)

    def forward(self, x):
        x = as_image(x)
        return x[:: self.factor, :: self.factor].copy()

    def adjoint(self, y):
        y = as_image(y)
        out = np.zeros(self.input_shape, dtype=np.float64)
        out[:: self.factor, :: self.factor] = y
        return out


class ComposedOperator:
    """outer(inner(x)), with the adjoint applied in reverse."""

    def __init__(self, outer, inner):
        if tuple(inner.output_shape) != tuple(outer.input_shape):
            raise ValueError("operator shapes do not chain")
        self.outer = outer
        self.inner = inner
        self.input_shape = inner.input_shape
        self.output_shape = outer.output_shape

    def forward(self, x):
        return self.outer.forward(self.inner.forward(x))

    def adjoint(self, y):
        return self.inner.adjoint(self.outer.adjoint(y))


def downsample(img, factor: int) -> np.ndarray:
    """Top-left phase decimation; trailing rows/columns are cropped if needed."""
    img = as_image(img)
    h, w = img.shape
    ch, cw = h - h % factor, w - w % factor
    if (ch, cw) != (h, w):
        log.warning("downsample: cropping %s to %s for factor %d", (h, w), (ch, cw), factor)
        img = img[:ch, :cw]
    return img[::factor, ::factor].copy()


def upsample_zero(img, factor: int, out_shape) -> np.ndarray:
    """Adjoint-style zero-filled upsampling onto the given grid."""
    img = as_image(img)
    out = np.zeros(out_shape, dtype=np.float64)
    out[:: factor, :: factor][: img.shape[0], : img.shape[1]] = img
    return out


def bin_image(img, b: int) -> np.ndarray:
    """Sum b x b blocks; dimensions are mirror-padded up to a multiple of b."""
    img = as_image(img)
    h, w = img.shape
    ph, pw = (-h) % b, (-w) % b
    if ph or pw:
        img = np.pad(img, ((0, ph), (0, pw)), mode="symmetric")
    hb, wb = img.shape[0] // b, img.shape[1] // b
    return img.reshape(hb, b, wb, b).sum(axis=(1, 3))


def unbin_upscale(binned, b: int, out_shape) -> np.ndarray:
    """Undo :func:`bin_image` by replication: each bin spreads its mean value."""
    binned = as_image(binned)
    big = np.repeat(np.repeat(binned, b, axis=0), b, axis=1) / (b * b)
    h, w = out_shape
    if big.shape[0] < h or big.shape[1] < w:
        raise ValueError("binned image too small for the requested shape")
    return big[:h, :w].copy()


def add_gaussian_noise(img, sigma_255: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise with std sigma_255 / 255 (no clipping)."""
    img = as_image(img)
    rng = np.random.default_rng(seed)
    return img + rng.normal(0.0, sigma_255 / 255.0, size=img.shape)


def sample_poisson(img, peak: float, seed: int, max_pix: float | None = None) -> np.ndarray:
    """Draw photon counts y ~ Poisson(peak * img / max_pix).

    max_pix defaults to the image maximum, which puts the brightest pixel at
    an expected count of exactly ``peak``.
    """
    img = as_image(img)
    if img.min() < 0:
        raise ValueError("intensities must be non-negative")
    if max_pix is None:
        max_pix = float(img.max())
    if not max_pix > 0:
        raise ValueError("max_pix must be positive")
    rng = np.random.default_rng(seed)
    return rng.poisson(peak * img / max_pix).astype(np.float64)
