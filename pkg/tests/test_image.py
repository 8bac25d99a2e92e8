import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patchorder.image import (as_image, column_stack_pixels, extract_patches, extract_subimage,
                              mirror_fold, mirror_pad, unstack_pixels)


def random_image(rng, max_side=9):
    h = rng.integers(1, max_side + 1)
    w = rng.integers(1, max_side + 1)
    return rng.random((h, w))


def test_column_stack_is_column_major():
    img = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert column_stack_pixels(img).tolist() == [1.0, 3.0, 2.0, 4.0]


@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_stack_round_trip(h, w, seed):
    img = np.random.default_rng(seed).random((h, w))
    assert np.array_equal(unstack_pixels(column_stack_pixels(img), (h, w)), img)


def test_as_image_rejects_bad_input():
    with pytest.raises(ValueError):
        as_image(np.ones(3))
    with pytest.raises(ValueError):
        as_image(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        as_image(np.empty((0, 3)))


def test_mirror_pad_repeats_edges():
    row = np.array([[1.0, 2.0, 3.0]])
    padded = mirror_pad(np.vstack([row, row, row]), 1)
    assert padded[1].tolist() == [1.0, 1.0, 2.0, 3.0, 3.0]
    assert padded.shape == (5, 5)
    # radius 0 is a plain copy
    img = np.arange(6.0).reshape(2, 3)
    out = mirror_pad(img, 0)
    assert np.array_equal(out, img) and out is not img


def test_mirror_pad_radius_limit():
    with pytest.raises(ValueError):
        mirror_pad(np.ones((3, 5)), 4)
    with pytest.raises(ValueError):
        mirror_pad(np.ones((3, 3)), -1)


def test_mirror_fold_is_adjoint_of_pad(rng):
    for _ in range(20):
        img = random_image(rng)
        p = int(rng.integers(0, min(img.shape) + 1))
        x = rng.standard_normal(img.shape)
        y = rng.standard_normal((img.shape[0] + 2 * p, img.shape[1] + 2 * p))
        lhs = float((mirror_pad(x, p) * y).sum())
        rhs = float((x * mirror_fold(y, p)).sum())
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_extract_subimage_central_shift_is_identity(rng):
    img = rng.random((6, 8))
    p = 2
    padded = mirror_pad(img, p)
    assert np.array_equal(extract_subimage(padded, p, p, img.shape), img)
    with pytest.raises(ValueError):
        extract_subimage(padded, 5, 0, img.shape)


def test_subimage_average_reconstructs_interior(rng):
    # Averaging all shifted windows after aligning them back must reproduce
    # every pixel that is at least p away from the border.
    img = rng.random((10, 11))
    side, p = 5, 2
    padded = mirror_pad(img, p)
    h, w = img.shape
    acc = np.zeros_like(img)
    cnt = np.zeros_like(img)
    for i in range(side):
        for j in range(side):
            win = extract_subimage(padded, i, j, img.shape)
            dr, dc = i - p, j - p
            # window entry (r, c) holds padded[i + r, j + c], which is the
            # original pixel (r + dr, c + dc) wherever that stays in range
            rows = np.arange(h) + dr
            cols = np.arange(w) + dc
            rmask = (rows >= 0) & (rows < h)
            cmask = (cols >= 0) & (cols < w)
            acc[np.ix_(rows[rmask], cols[cmask])] += win[np.ix_(np.flatnonzero(rmask), np.flatnonzero(cmask))]
            cnt[np.ix_(rows[rmask], cols[cmask])] += 1.0
    avg = acc / cnt
    interior = (slice(p, h - p), slice(p, w - p))
    assert np.allclose(avg[interior], img[interior], atol=1e-12)


def test_extract_patches_center_reproduces_pixels(rng):
    img = rng.random((7, 5))
    ps = extract_patches(img, 3)
    assert ps.data.shape == (35, 9)
    assert np.array_equal(ps.data[:, ps.center_column], column_stack_pixels(img))


def test_extract_patches_matches_manual_padding(rng):
    img = rng.random((4, 6))
    side = 5
    ps = extract_patches(img, side)
    padded = np.pad(img, side // 2, mode="symmetric")
    for k in range(img.size):
        r, c = k % 4, k // 4
        expected = padded[r : r + side, c : c + side].ravel(order="F")
        assert np.array_equal(ps.data[k], expected)


def test_extract_patches_validates_side(rng):
    img = rng.random((5, 5))
    for side in (0, 2, -3):
        with pytest.raises(ValueError):
            extract_patches(img, side)
