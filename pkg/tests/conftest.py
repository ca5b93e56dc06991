import numpy as np
import pytest

from slabcode.imgio import save_image
from slabcode.synthgen import SynthParams, generate_slab


@pytest.fixture(scope="session")
def make_fixture(tmp_path_factory):
    """Factory for slab fixtures on disk: returns (png path, rgb array, record)."""
    root = tmp_path_factory.mktemp("fixtures")
    counter = {"n": 0}

    def _make(code: str, **params):
        img, record = generate_slab(code, SynthParams(**params))
        counter["n"] += 1
        path = root / f"slab_{counter['n']:03d}_{code}.png"
        save_image(img, path)
        return path, img, record

    return _make


@pytest.fixture()
def flat_gray():
    """Plain granite-gray RGB image with no bands."""
    def _make(width=120, height=90, value=150):
        return np.full((height, width, 3), value, dtype=np.uint8)

    return _make
