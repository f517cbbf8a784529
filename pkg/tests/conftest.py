from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rhcd.rasters import GeoRaster, GridSpec
from rhcd.tiling import Patch

MOCK_BACKEND = Path(__file__).parent / "mock_backend.py"


def backend_cmd(mode: str) -> str:
    return f"{sys.executable} {MOCK_BACKEND} {mode}"


def make_patch(
    patch_id: str = "t:0:0",
    unit_id: int = 1,
    gray: int = 128,
    size: int = 50,
) -> Patch:
    pixels = np.full((size, size, 3), gray, dtype=np.uint8)
    return Patch(
        patch_id=patch_id,
        unit_id=unit_id,
        origin=(0.0, size * 0.1),
        pixels=pixels,
        road_fraction=1.0,
    )


def make_raster(
    width: int = 10,
    height: int = 10,
    pixel_size: float = 1.0,
    origin: tuple[float, float] = (0.0, 10.0),
    fill: int = 100,
) -> GeoRaster:
    data = np.full((height, width, 3), fill, dtype=np.uint8)
    return GeoRaster(grid=GridSpec(width, height, origin, pixel_size), data=data)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
