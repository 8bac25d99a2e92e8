"""Quality metrics and ordering diagnostics.

PSNR and SSIM follow the usual grayscale conventions (SSIM: 11 x 11 Gaussian
window with sigma 1.5, K1 = 0.01, K2 = 0.03, border cropped by the window
radius).  The diagnostic helpers inspect how well an ordering works: the tail
distribution of the weighted second differences, the absolute gradient along
the path, overlapping group MSE profiles, and masks of the pixels that sit at
the end of the path for one or for all shifted copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.ndimage as ndi

from .image import as_image, column_stack_pixels, unstack_pixels
from .ordering import Permutation
from .regularizer import OrderingWeights, laplacian_1d

__all__ = [
    "psnr",
    "ssim",
    "TailDistribution",
    "tail_distribution",
    "OrderingDiagnostics",
    "ordering_diagnostics",
    "save_tail_csv",
    "save_series_csv",
    "write_mask_pgm",
]


def psnr(a, b, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; infinity for identical inputs."""
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise ValueError("shapes differ")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def ssim(a, b, data_range: float = 1.0, k1: float = 0.01, k2: float = 0.03,
         sigma: float = 1.5) -> float:
    """Mean structural similarity with a Gaussian weighting window."""
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise ValueError("shapes differ")
    radius = 5
    if min(a.shape) <= 2 * radius:
        raise ValueError("image too small for the 11 x 11 SSIM window")
    truncate = radius / sigma

    def blur(z):
        return ndi.gaussian_filter(z, sigma, truncate=truncate)

    ua, ub = blur(a), blur(b)
    vaa = blur(a * a) - ua * ua
    vbb = blur(b * b) - ub * ub
    vab = blur(a * b) - ua * ub
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    s = ((2 * ua * ub + c1) * (2 * vab + c2)) / ((ua * ua + ub * ub + c1) * (vaa + vbb + c2))
    return float(s[radius:-radius, radius:-radius].mean())


@dataclass(frozen=True)
class TailDistribution:
    """Pr(|weighted second difference| > threshold) on a uniform threshold grid."""

    thresholds: np.ndarray
    probabilities: np.ndarray


def tail_distribution(img, perm: Permutation, weights: OrderingWeights,
                      bins: int = 256) -> TailDistribution:
    """Exact exceedance curve of |m * L P x| at ``bins`` uniform thresholds."""
    v = column_stack_pixels(img)
    mags = np.sort(np.abs(weights.values * laplacian_1d(perm.apply(v))))
    top = float(mags[-1]) if mags[-1] > 0 else 1.0
    thresholds = np.linspace(0.0, top, bins + 1)[:-1]
    exceed = mags.size - np.searchsorted(mags, thresholds, side="right")
    return TailDistribution(thresholds=thresholds, probabilities=exceed / mags.size)


def _reflect_index(offsets: np.ndarray, size: int) -> np.ndarray:
    out = offsets.copy()
    neg = out < 0
    out[neg] = -out[neg] - 1
    big = out > size - 1
    out[big] = 2 * size - 1 - out[big]
    return out


@dataclass
class OrderingDiagnostics:
    """Per-path statistics; masks are in image layout."""

    abs_gradient: np.ndarray
    group_mse: Optional[np.ndarray]
    last_mask: np.ndarray
    all_shifts_last_mask: np.ndarray
    all_shifts_last_fraction: float


def ordering_diagnostics(img, perm: Permutation, patch_side: int,
                         reference=None, groups: int = 50, overlap: float = 0.5,
                         tail_fraction: float = 0.15) -> OrderingDiagnostics:
    """Inspect where an ordering places its pixels.

    abs_gradient: |differences| of the image along the path.
    group_mse: squared error against ``reference`` averaged over ``groups``
        consecutive path segments with the given fractional overlap.
    last_mask: pixels in the final ``tail_fraction`` of the central path.
    all_shifts_last_mask / fraction: pixels that fall in the final stretch of
        the path for every one of the patch_side^2 shifted copies.
    """
    img = as_image(img)
    h, w = img.shape
    n_pix = h * w
    if perm.size != n_pix:
        raise ValueError("permutation does not match the image")
    v = column_stack_pixels(img)
    ordered = perm.apply(v)
    abs_gradient = np.abs(np.diff(ordered))

    group_mse = None
    if reference is not None:
        err = (column_stack_pixels(as_image(reference)) - v) ** 2
        err_ordered = err[perm.order]
        length = max(1, int(round(2 * n_pix / (groups + 1))))
        step = max(1, int(round(length * (1.0 - overlap))))
        group_mse = np.array([
            err_ordered[s : min(s + length, n_pix)].mean()
            for s in (min(i * step, n_pix - length) for i in range(groups))
        ])

    cut = int(math.ceil((1.0 - tail_fraction) * n_pix))
    tail_positions = perm.order[cut:]
    last_flat = np.zeros(n_pix, dtype=bool)
    last_flat[tail_positions] = True

    # Map padded coordinates back to their mirror sources once, then
    # intersect the per-shift tail masks.
    p = patch_side // 2
    hp, wp = h + 2 * p, w + 2 * p
    rmap = _reflect_index(np.arange(hp) - p, h)
    cmap = _reflect_index(np.arange(wp) - p, w)
    r = perm.order % h
    c = perm.order // h
    tail_r = r[cut:]
    tail_c = c[cut:]
    inter = np.ones(n_pix, dtype=bool)
    for j in range(patch_side):
        for i in range(patch_side):
            src = cmap[tail_c + j] * h + rmap[tail_r + i]
            shift_mask = np.zeros(n_pix, dtype=bool)
            shift_mask[src] = True
            inter &= shift_mask
    fraction = float(inter.sum()) / n_pix
    return OrderingDiagnostics(
        abs_gradient=abs_gradient,
        group_mse=group_mse,
        last_mask=unstack_pixels(last_flat.astype(np.float64), (h, w)) > 0.5,
        all_shifts_last_mask=unstack_pixels(inter.astype(np.float64), (h, w)) > 0.5,
        all_shifts_last_fraction=fraction,
    )


def save_tail_csv(tail: TailDistribution, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("threshold,probability\n")
        for t, q in zip(tail.thresholds, tail.probabilities):
            fh.write(f"{float(t)!r},{float(q)!r}\n")


def save_series_csv(values, path, header: str = "index,value") -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for i, val in enumerate(np.asarray(values).ravel()):
            fh.write(f"{i},{float(val)!r}\n")


def write_mask_pgm(path, mask) -> None:
    """Save a boolean mask as a black/white PGM."""
    from .imgio import write_pgm

    write_pgm(path, np.asarray(mask, dtype=np.float64), bits=8)
