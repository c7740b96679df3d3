import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from hessteg import Image


def synthetic_cover(size: int = 512, seed: int = 0) -> Image:
    """Smooth sky gradient on top, blurred blobs in the middle, fine texture at the bottom."""
    rng = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:size, 0:size].astype(float)
    sky = 60 + 100 * rows / size + 20 * cols / size
    blobs = 128 + 400 * gaussian_filter(rng.normal(size=(size, size)), 6)
    texture = 128 + 50 * gaussian_filter(rng.normal(size=(size, size)), 0.8) + 20 * rng.normal(size=(size, size))
    img = np.where(rows < size // 4, sky, np.where(rows < size // 2, blobs, texture))
    return Image.from_array(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def half_flat_half_noise(size: int = 512, seed: int = 0) -> Image:
    rng = np.random.default_rng(seed)
    px = np.full((size, size), 128, dtype=np.uint8)
    px[:, size // 2 :] = rng.integers(0, 256, size=(size, size - size // 2))
    return Image.from_array(px)


@pytest.fixture(scope="session")
def cover512():
    return synthetic_cover(512, 0)


@pytest.fixture(scope="session")
def cover64():
    return synthetic_cover(64, 1)
