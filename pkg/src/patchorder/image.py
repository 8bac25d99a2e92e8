"""Grayscale image geometry: column stacking, mirror padding, shifted
subimages and the patch matrix.

Images are plain 2D float64 arrays (height x width).  Vectorization is
column-major throughout: ``column_stack_pixels([[a, b], [c, d]]) == [a, c, b, d]``,
so pixel (r, c) of an H x W image sits at vector index ``c * H + r``.  Patches
are enumerated in the same order, which makes patch indices and stacked pixel
indices interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "as_image",
    "column_stack_pixels",
    "unstack_pixels",
    "mirror_pad",
    "mirror_fold",
    "extract_subimage",
    "extract_patches",
    "PatchSet",
]


def as_image(x) -> np.ndarray:
    """Validate ``x`` as a finite 2D image and return it as float64."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("image has no pixels")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    return arr


def column_stack_pixels(img) -> np.ndarray:
    """Stack an image into a vector column by column."""
    return as_image(img).ravel(order="F")


def unstack_pixels(vec, shape) -> np.ndarray:
    """Inverse of :func:`column_stack_pixels` for the given (H, W) shape."""
    vec = np.asarray(vec, dtype=np.float64)
    h, w = shape
    if vec.ndim != 1 or vec.size != h * w:
        raise ValueError(f"vector of size {vec.size} does not fill shape {shape}")
    return vec.reshape((h, w), order="F")


def mirror_pad(img, radius: int) -> np.ndarray:
    """Pad by edge-inclusive reflection: [1, 2, 3] with radius 1 -> [1, 1, 2, 3, 3].

    The radius must not exceed either image dimension so a single reflection
    covers the border.
    """
    img = as_image(img)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius > min(img.shape):
        raise ValueError(f"radius {radius} exceeds image dimensions {img.shape}")
    if radius == 0:
        return img.copy()
    return np.pad(img, radius, mode="symmetric")


def mirror_fold(padded, radius: int) -> np.ndarray:
    """Adjoint of :func:`mirror_pad`: border samples fold back onto their sources.

    Satisfies <mirror_pad(x), y> == <x, mirror_fold(y)> for all x, y.
    """
    padded = as_image(padded)
    p = radius
    if p == 0:
        return padded.copy()
    hp, wp = padded.shape
    h, w = hp - 2 * p, wp - 2 * p
    if h <= 0 or w <= 0 or p > min(h, w):
        raise ValueError(f"radius {p} inconsistent with padded shape {padded.shape}")
    rows = padded[p : p + h, :].copy()
    for t in range(p):
        rows[p - 1 - t, :] += padded[t, :]
        rows[h - 1 - t, :] += padded[p + h + t, :]
    out = rows[:, p : p + w].copy()
    for t in range(p):
        out[:, p - 1 - t] += rows[:, t]
        out[:, w - 1 - t] += rows[:, p + w + t]
    return out


def extract_subimage(padded, row_shift: int, col_shift: int, shape) -> np.ndarray:
    """Window of the padded image at offset (row_shift, col_shift), original size.

    Shifts are 0-based; with padding radius p the central shift (p, p) returns
    the original image.
    """
    padded = as_image(padded)
    h, w = shape
    if row_shift < 0 or col_shift < 0:
        raise ValueError("shifts must be non-negative")
    if row_shift + h > padded.shape[0] or col_shift + w > padded.shape[1]:
        raise ValueError("shifted window falls outside the padded image")
    return padded[row_shift : row_shift + h, col_shift : col_shift + w].copy()


@dataclass(frozen=True)
class PatchSet:
    """All patch_side x patch_side patches of an image, one per pixel.

    Row k of ``data`` is the patch centered on stacked pixel k, taken from the
    mirror-padded image; entries are flattened column-major, so the center sits
    at column ``(patch_side // 2) * patch_side + patch_side // 2``.
    """

    data: np.ndarray
    patch_side: int
    image_shape: tuple[int, int]

    @property
    def n_patches(self) -> int:
        return self.data.shape[0]

    @property
    def patch_size(self) -> int:
        return self.data.shape[1]

    @property
    def center_column(self) -> int:
        p = self.patch_side // 2
        return p * self.patch_side + p


def extract_patches(img, patch_side: int) -> PatchSet:
    """Extract the patch matrix of ``img`` with mirror padding at the borders."""
    img = as_image(img)
    if patch_side < 1 or patch_side % 2 == 0:
        raise ValueError("patch_side must be a positive odd integer")
    h, w = img.shape
    p = patch_side // 2
    padded = mirror_pad(img, p) if p else img
    n = patch_side * patch_side
    data = np.empty((h * w, n), dtype=np.float64)
    for j in range(patch_side):
        for i in range(patch_side):
            data[:, j * patch_side + i] = padded[i : i + h, j : j + w].ravel(order="F")
    return PatchSet(data=data, patch_side=patch_side, image_shape=(h, w))
