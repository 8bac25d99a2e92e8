"""Pixel orderings built from patch similarity.

A :class:`Permutation` reorders the column-stacked pixels of an image so that
consecutive entries have similar patches.  The ordering is a randomized
nearest-neighbor walk: from the current patch, the two closest unvisited
patches inside a square search window are found by Euclidean distance, and one
of them is chosen at random with probability proportional to exp(-d^2 / delta).
A window that contains exactly one unvisited patch is followed deterministically;
an empty window falls back to a global search over all unvisited patches under
the same rule.

The walk is seeded and fully deterministic: randomness comes from an inline
splitmix64 generator that draws once for the start pixel (when not fixed) and
once per two-candidate choice, so a given (patches, params) pair always yields
the same ordering.  As delta approaches 0 the choice degenerates to plain
greedy nearest-neighbor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .image import PatchSet, column_stack_pixels

__all__ = [
    "Permutation",
    "OrderingParams",
    "neighbor_probabilities",
    "randomized_nn_order",
    "apply_permutation",
    "invert_permutation",
    "raster_permutation",
    "zigzag_permutation",
    "ordering_tv",
    "TvResult",
    "save_permutation",
    "load_permutation",
]

_U64_MASK = (1 << 64) - 1


class Permutation:
    """A bijection on {0, ..., N-1}.  Applying gathers: (P v)[k] = v[order[k]]."""

    def __init__(self, order):
        order = np.asarray(order, dtype=np.int64)
        if order.ndim != 1 or order.size == 0:
            raise ValueError("order must be a non-empty 1D index array")
        if order.min() < 0 or order.max() >= order.size:
            raise ValueError("order entries out of range")
        if np.bincount(order, minlength=order.size).max() > 1:
            raise ValueError("order is not a bijection")
        self.order = order
        self._inverse: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.order.size

    @property
    def inverse(self) -> np.ndarray:
        if self._inverse is None:
            inv = np.empty_like(self.order)
            inv[self.order] = np.arange(self.order.size, dtype=np.int64)
            self._inverse = inv
        return self._inverse

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.size,):
            raise ValueError(f"vector of shape {v.shape} does not match permutation size {self.size}")
        return v[self.order]

    def invert(self, v) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.size,):
            raise ValueError(f"vector of shape {v.shape} does not match permutation size {self.size}")
        return v[self.inverse]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.order, other.order)

    def __repr__(self) -> str:
        return f"Permutation(size={self.size})"


def apply_permutation(perm: Permutation, v) -> np.ndarray:
    return perm.apply(v)


def invert_permutation(perm: Permutation, v) -> np.ndarray:
    return perm.invert(v)


@dataclass(frozen=True)
class OrderingParams:
    """Parameters of the randomized nearest-neighbor walk.

    window_side: odd side length of the square search window, in pixels.
    delta: temperature of the two-candidate choice; must be positive, and
        values near 0 give greedy nearest-neighbor behavior.
    seed: any integer; taken modulo 2**64.
    start_index: fixed start pixel, or None to draw it from the seed.
    """

    window_side: int
    delta: float
    seed: int = 0
    start_index: int | None = None

    def __post_init__(self):
        if self.window_side < 1 or self.window_side % 2 == 0:
            raise ValueError("window_side must be a positive odd integer")
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def neighbor_probabilities(d1_sq: float, d2_sq: float, delta: float) -> tuple[float, float]:
    """Selection probabilities for the two nearest candidates.

    Each candidate gets weight exp(-d^2 / delta), normalized to sum to one;
    equal distances give (1/2, 1/2).  Computed in logistic form so huge
    distance gaps cannot overflow.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    t = (d1_sq - d2_sq) / delta
    if t <= 0:
        p1 = 1.0 / (1.0 + math.exp(t)) if t > -745.0 else 1.0
    else:
        e = math.exp(-t) if t < 745.0 else 0.0
        p1 = e / (1.0 + e)
    return p1, 1.0 - p1


@numba.njit(cache=True)
def _splitmix64(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@numba.njit(cache=True)
def _nn_order_kernel(patches, h, w, hw, delta, seed, start_index):
    n_pix, n_dim = patches.shape
    order = np.empty(n_pix, np.int64)
    visited = np.zeros(n_pix, np.bool_)
    # Doubly linked list over unvisited pixels for the global fallback.
    nxt = np.empty(n_pix, np.int64)
    prv = np.empty(n_pix, np.int64)
    for k in range(n_pix):
        nxt[k] = k + 1
        prv[k] = k - 1
    head = 0
    state = np.uint64(seed)

    if start_index >= 0:
        cur = start_index
    else:
        state, z = _splitmix64(state)
        u = (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)
        cur = np.int64(u * n_pix)
        if cur >= n_pix:
            cur = n_pix - 1

    for t in range(n_pix):
        order[t] = cur
        visited[cur] = True
        if prv[cur] >= 0:
            nxt[prv[cur]] = nxt[cur]
        else:
            head = nxt[cur]
        if nxt[cur] < n_pix:
            prv[nxt[cur]] = prv[cur]
        if t == n_pix - 1:
            break

        r0 = cur % h
        c0 = cur // h
        r_lo = r0 - hw
        if r_lo < 0:
            r_lo = 0
        r_hi = r0 + hw
        if r_hi > h - 1:
            r_hi = h - 1
        c_lo = c0 - hw
        if c_lo < 0:
            c_lo = 0
        c_hi = c0 + hw
        if c_hi > w - 1:
            c_hi = w - 1

        best1 = -1
        best2 = -1
        d1 = np.inf
        d2 = np.inf
        count = 0
        for c in range(c_lo, c_hi + 1):
            base = c * h
            for r in range(r_lo, r_hi + 1):
                k = base + r
                if visited[k]:
                    continue
                count += 1
                acc = 0.0
                for m in range(n_dim):
                    diff = patches[cur, m] - patches[k, m]
                    acc += diff * diff
                    if acc >= d2:
                        break
                if acc < d1:
                    d2 = d1
                    best2 = best1
                    d1 = acc
                    best1 = k
                elif acc < d2:
                    d2 = acc
                    best2 = k

        if count == 0:
            # Window exhausted: search every unvisited pixel.
            k = head
            while k < n_pix:
                count += 1
                acc = 0.0
                for m in range(n_dim):
                    diff = patches[cur, m] - patches[k, m]
                    acc += diff * diff
                    if acc >= d2:
                        break
                if acc < d1:
                    d2 = d1
                    best2 = best1
                    d1 = acc
                    best1 = k
                elif acc < d2:
                    d2 = acc
                    best2 = k
                k = nxt[k]

        if count == 1:
            cur = best1
        else:
            state, z = _splitmix64(state)
            u = (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)
            arg = (d1 - d2) / delta  # <= 0, so exp cannot overflow
            p1 = 1.0 / (1.0 + math.exp(arg))
            cur = best1 if u < p1 else best2
    return order


def randomized_nn_order(patches: PatchSet, params: OrderingParams) -> Permutation:
    """Order all patches by the seeded randomized nearest-neighbor walk."""
    h, w = patches.image_shape
    n_pix = patches.n_patches
    start = -1 if params.start_index is None else int(params.start_index)
    if start >= n_pix:
        raise ValueError(f"start_index {start} out of range for {n_pix} patches")
    data = np.ascontiguousarray(patches.data, dtype=np.float64)
    order = _nn_order_kernel(
        data,
        h,
        w,
        (params.window_side - 1) // 2,
        float(params.delta),
        np.uint64(params.seed & _U64_MASK),
        start,
    )
    return Permutation(order)


def raster_permutation(shape) -> Permutation:
    """Row-by-row scan (left to right on every row), as stacked pixel indices."""
    h, w = shape
    idx = np.arange(w, dtype=np.int64)[None, :] * h + np.arange(h, dtype=np.int64)[:, None]
    return Permutation(idx.ravel(order="C"))


def zigzag_permutation(shape) -> Permutation:
    """Horizontal boustrophedon scan: odd rows run right to left."""
    h, w = shape
    idx = np.arange(w, dtype=np.int64)[None, :] * h + np.arange(h, dtype=np.int64)[:, None]
    idx = idx.copy()
    idx[1::2, :] = idx[1::2, ::-1]
    return Permutation(idx.ravel(order="C"))


class TvResult(NamedTuple):
    total: float
    average: float


def ordering_tv(img, perm: Permutation) -> TvResult:
    """Total variation of the pixels traversed in permutation order."""
    v = column_stack_pixels(img) if np.ndim(img) == 2 else np.asarray(img, dtype=np.float64)
    d = np.abs(np.diff(perm.apply(v)))
    total = float(d.sum())
    avg = total / d.size if d.size else 0.0
    return TvResult(total=total, average=avg)


def save_permutation(perm: Permutation, path) -> None:
    """Write the ordering as newline-delimited decimal indices."""
    np.savetxt(path, perm.order, fmt="%d")


def load_permutation(path) -> Permutation:
    return Permutation(np.loadtxt(path, dtype=np.int64, ndmin=1))
