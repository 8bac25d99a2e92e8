import os

import numpy as np
import pytest
import scipy.ndimage as ndi

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")
EXTERNAL_DIR = os.path.join(FIXTURE_DIR, "external")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, name)


def smooth_image(shape, seed, blur=2.0):
    """Random image with correlated structure, in [0, 1]."""
    rng = np.random.default_rng(seed)
    img = ndi.gaussian_filter(rng.random(shape), blur)
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def load_fixture(name: str):
    from patchorder.imgio import read_image

    path = fixture_path(name)
    if name.endswith(".npy"):
        return np.load(path).astype(np.float64)
    return read_image(path)


def require_external(name: str):
    """Path of an optional externally supplied image, or skip."""
    path = os.path.join(EXTERNAL_DIR, name)
    if not os.path.exists(path):
        pytest.skip(f"external fixture {name} not present")
    return path
