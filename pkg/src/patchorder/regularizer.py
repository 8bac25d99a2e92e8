"""Smoothness prior along a pixel ordering.

The prior treats the permuted pixels as a 1D signal and penalizes its second
differences through a smoothed absolute value, once for every shifted subimage
of the mirror-padded input.  Each position k carries a weight
m_k = min(gamma_k / beta_k, m_max), where beta_k measures how curved the patch
sequence is around k (straight runs get large weights, discontinuities small
ones) and gamma_k boosts patches that sit on strong edges.  Weights and the
ordering are computed once from a reference image and stay fixed while the
objective is minimized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.ndimage as ndi
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .image import PatchSet, as_image, column_stack_pixels, mirror_fold, mirror_pad, unstack_pixels
from .ordering import Permutation

__all__ = [
    "RegularizerConfig",
    "OrderingWeights",
    "laplacian_1d",
    "laplacian_1d_adjoint",
    "smoothed_abs",
    "smoothed_abs_grad",
    "edge_gamma",
    "compute_weights",
    "SmoothnessPrior",
    "smoothness_value_grad",
    "quadratic_smoothness_value_grad",
    "l2_closed_form_denoise",
    "write_weight_heatmap",
]


@dataclass(frozen=True)
class RegularizerConfig:
    """Weight construction parameters.

    g_thr is the edge threshold on the per-patch gradient-magnitude sum; None
    disables edge detection so every gamma is 1.
    """

    gamma_edge: float = 1.5
    g_thr: float | None = 3.5
    m_max: float = 20.0
    epsilon_r: float = 0.1


@dataclass(frozen=True)
class OrderingWeights:
    """Per-position weights of an ordered patch sequence.

    values: the diagonal weights m_k actually applied to the Laplacian.
    curvatures: beta_k = 0.5 * ||2 z_k - z_{k-1} - z_{k+1}||_2 with replicated ends.
    edge_scale: gamma_k of the patch at position k.
    """

    values: np.ndarray
    curvatures: np.ndarray
    edge_scale: np.ndarray


def laplacian_1d(v: np.ndarray) -> np.ndarray:
    """Second difference with replicated end samples: [0,1,2,3] -> [-1,0,0,1]."""
    out = 2.0 * v
    out[1:] -= v[:-1]
    out[0] -= v[0]
    out[:-1] -= v[1:]
    out[-1] -= v[-1]
    return out


def laplacian_1d_adjoint(u: np.ndarray) -> np.ndarray:
    """Transpose of :func:`laplacian_1d` as an explicit stencil."""
    out = 2.0 * u
    out[:-1] -= u[1:]
    out[0] -= u[0]
    out[1:] -= u[:-1]
    out[-1] -= u[-1]
    return out


def smoothed_abs(w, epsilon: float):
    """rho(w) = w^2 / (|w| + epsilon): even, zero at 0, within epsilon of |w|."""
    a = np.abs(w)
    return w * w / (a + epsilon)


def smoothed_abs_grad(w, epsilon: float):
    """Derivative of :func:`smoothed_abs`; odd and bounded by 1 in magnitude."""
    a = np.abs(w)
    return w * (a + 2.0 * epsilon) / (a + epsilon) ** 2


def edge_gamma(img, patches: PatchSet, cfg: RegularizerConfig) -> np.ndarray:
    """Per-pixel edge factors gamma, in stacked pixel order.

    The gradient magnitude g = sqrt(gx^2 + gy^2) uses central differences with
    mirrored neighbors at the borders; a patch whose summed g exceeds cfg.g_thr
    gets cfg.gamma_edge, all others get 1.
    """
    img = as_image(img)
    if img.shape != patches.image_shape:
        raise ValueError("image shape does not match the patch set")
    if cfg.g_thr is None:
        return np.ones(img.size, dtype=np.float64)
    pad1 = mirror_pad(img, 1)
    gx = 0.5 * (pad1[1:-1, 2:] - pad1[1:-1, :-2])
    gy = 0.5 * (pad1[2:, 1:-1] - pad1[:-2, 1:-1])
    g = np.hypot(gx, gy)
    n = patches.patch_side ** 2
    sums = ndi.uniform_filter(g, size=patches.patch_side, mode="reflect") * n
    gamma = np.where(sums > cfg.g_thr, cfg.gamma_edge, 1.0)
    return gamma.ravel(order="F")


def compute_weights(ordered_patches: np.ndarray, gamma: np.ndarray, cfg: RegularizerConfig) -> OrderingWeights:
    """Weights for a patch sequence already arranged in ordering position.

    ``gamma`` must be permuted the same way as the patch rows.  Positions with
    zero curvature get the cap m_max.
    """
    z = np.asarray(ordered_patches, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    n_pos = z.shape[0]
    if gamma.shape != (n_pos,):
        raise ValueError("gamma length does not match the number of patches")
    beta = np.empty(n_pos, dtype=np.float64)
    chunk = 1 << 16
    for s in range(0, n_pos, chunk):
        e = min(s + chunk, n_pos)
        rows = np.arange(s, e)
        prev_rows = np.maximum(rows - 1, 0)
        next_rows = np.minimum(rows + 1, n_pos - 1)
        d = 2.0 * z[rows] - z[prev_rows] - z[next_rows]
        beta[s:e] = 0.5 * np.sqrt(np.einsum("ij,ij->i", d, d))
    safe = np.where(beta > 0, beta, 1.0)
    values = np.where(beta > 0, np.minimum(gamma / safe, cfg.m_max), cfg.m_max)
    return OrderingWeights(values=values, curvatures=beta, edge_scale=gamma)


class SmoothnessPrior:
    """Bound ordering, weights and geometry for repeated value/gradient calls.

    The prior is sum over all patch_side^2 shifts (i, j) of
    sum_k rho(m_k * [L P S_{i,j} x]_k, epsilon), where S_{i,j} extracts the
    original-size window of the mirror-padded x at offset (i, j), P permutes it
    and L is the second difference along the ordering.  The gradient applies
    the exact adjoints, folding padded-border contributions back onto their
    source pixels.
    """

    def __init__(self, perm: Permutation, weights: OrderingWeights, patch_side: int,
                 image_shape: tuple[int, int], epsilon: float):
        h, w = image_shape
        if perm.size != h * w:
            raise ValueError("permutation size does not match the image")
        if weights.values.shape != (h * w,):
            raise ValueError("weights length does not match the image")
        self.patch_side = patch_side
        self.image_shape = (h, w)
        self.epsilon = float(epsilon)
        self._pad = patch_side // 2
        self._hp = h + 2 * self._pad
        self._wp = w + 2 * self._pad
        r = perm.order % h
        c = perm.order // h
        # Stacked index into the padded image for shift (0, 0); shift (i, j)
        # adds j * padded_height + i.
        self._base = c * self._hp + r
        self._m = weights.values

    def value_grad(self, x) -> tuple[float, np.ndarray]:
        x = as_image(x)
        if x.shape != self.image_shape:
            raise ValueError(f"expected image of shape {self.image_shape}, got {x.shape}")
        pf = mirror_pad(x, self._pad).ravel(order="F")
        gpf = np.zeros_like(pf)
        m = self._m
        eps = self.epsilon
        total = 0.0
        for j in range(self.patch_side):
            col = j * self._hp
            for i in range(self.patch_side):
                idx = self._base + (col + i)
                t = m * laplacian_1d(pf[idx])
                a = np.abs(t)
                total += float((t * t / (a + eps)).sum())
                u = m * (t * (a + 2.0 * eps) / (a + eps) ** 2)
                gpf[idx] += laplacian_1d_adjoint(u)
        gp = gpf.reshape((self._hp, self._wp), order="F")
        return total, mirror_fold(gp, self._pad)


def smoothness_value_grad(x, perm: Permutation, weights: OrderingWeights,
                          patch_side: int, epsilon: float) -> tuple[float, np.ndarray]:
    """One-shot wrapper around :class:`SmoothnessPrior`."""
    x = as_image(x)
    prior = SmoothnessPrior(perm, weights, patch_side, x.shape, epsilon)
    return prior.value_grad(x)


def quadratic_smoothness_value_grad(x, perm: Permutation) -> tuple[float, np.ndarray]:
    """0.5 * ||L P x||^2 and its gradient, central shift only, unit weights."""
    x = as_image(x)
    v = column_stack_pixels(x)
    l = laplacian_1d(perm.apply(v))
    g = np.empty_like(v)
    g[perm.order] = laplacian_1d_adjoint(l)
    return 0.5 * float(l @ l), unstack_pixels(g, x.shape)


def _laplacian_matrix(n: int) -> sp.csr_matrix:
    lap = sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n), format="lil")
    lap[0, 0] = 1.0
    lap[n - 1, n - 1] = 1.0
    return lap.tocsr()


def l2_closed_form_denoise(y, perm: Permutation, mu: float) -> np.ndarray:
    """Exact minimizer of 0.5 * ||x - y||^2 + 0.5 * mu * ||L P x||^2.

    Solved as the sparse normal equations (I + mu * L^T L) w = P y in the
    permuted domain, then mapped back.  Intended as a small-problem reference.
    """
    y = as_image(y)
    n = y.size
    lap = _laplacian_matrix(n)
    a = (sp.eye(n, format="csr") + mu * (lap.T @ lap)).tocsc()
    w = spla.spsolve(a, perm.apply(column_stack_pixels(y)))
    return unstack_pixels(perm.invert(w), y.shape)


def write_weight_heatmap(path, per_position: np.ndarray, perm: Permutation, shape) -> None:
    """Dump ordering-position values (weights, gamma, ...) as a PGM heatmap.

    Values are mapped back to their source pixels and linearly rescaled to the
    full gray range.
    """
    from .imgio import write_pgm

    vals = np.asarray(per_position, dtype=np.float64)
    flat = np.empty(perm.size, dtype=np.float64)
    flat[perm.order] = vals
    img = unstack_pixels(flat, shape)
    lo, hi = float(img.min()), float(img.max())
    scale = (img - lo) / (hi - lo) if hi > lo else np.zeros_like(img)
    write_pgm(path, scale, bits=8)
