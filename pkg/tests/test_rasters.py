from __future__ import annotations

import numpy as np
import pytest

from tiff_fixture import build_tiff
from rhcd.errors import UnsupportedFormatError, ValidationError
from rhcd.rasters import (
    GeoRaster,
    GridSpec,
    read_raster,
    read_world_file,
    world_file_path,
    write_raster,
    write_world_file,
)


class TestWorldFile:
    def test_round_trip(self, tmp_path):
        grid = GridSpec(4, 3, (2600000.0, 1200000.0), 0.1)
        path = tmp_path / "img.wld"
        write_world_file(path, grid)
        pixel_size, origin = read_world_file(path)
        assert pixel_size == 0.1
        assert origin == grid.origin

    def test_pixel_size_from_file(self, tmp_path):
        path = tmp_path / "x.wld"
        path.write_text("0.1\n0.0\n0.0\n-0.1\n0.05\n159.95\n")
        pixel_size, origin = read_world_file(path)
        assert pixel_size == 0.1
        assert origin == (0.0, 160.0)

    def test_rotation_rejected(self, tmp_path):
        path = tmp_path / "x.wld"
        path.write_text("0.1\n0.01\n0.0\n-0.1\n0.0\n0.0\n")
        with pytest.raises(UnsupportedFormatError, match="rotated"):
            read_world_file(path)

    def test_missing_sidecar(self, tmp_path):
        with pytest.raises(ValidationError, match="world file"):
            read_world_file(tmp_path / "none.wld")


class TestPnm:
    def test_ppm_round_trip_bit_exact(self, tmp_path, rng):
        data = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
        raster = GeoRaster(grid=GridSpec(7, 5, (10.0, 20.0), 0.25), data=data)
        path = tmp_path / "img.ppm"
        write_raster(raster, path)
        back = read_raster(path)
        assert back.grid == raster.grid
        assert back.bands == 3
        assert (back.data == data).all()

    def test_2x2_rgb_round_trip(self, tmp_path):
        data = np.array(
            [[[255, 0, 0], [0, 255, 0]], [[0, 0, 255], [10, 20, 30]]], dtype=np.uint8
        )
        raster = GeoRaster(grid=GridSpec(2, 2, (0.0, 0.2), 0.1), data=data)
        path = tmp_path / "tiny.ppm"
        write_raster(raster, path)
        back = read_raster(path)
        assert (back.data == data).all()
        assert back.pixel_size == 0.1
        assert back.origin == (0.0, 0.2)

    def test_pgm_round_trip(self, tmp_path):
        data = np.arange(12, dtype=np.uint8).reshape(3, 4)
        raster = GeoRaster(grid=GridSpec(4, 3, (0.0, 3.0), 1.0), data=data)
        path = tmp_path / "img.pgm"
        write_raster(raster, path)
        back = read_raster(path)
        assert (back.data == data).all()

    def test_band_mismatch_rejected(self, tmp_path):
        gray = GeoRaster(
            grid=GridSpec(2, 2, (0.0, 2.0), 1.0),
            data=np.zeros((2, 2), dtype=np.uint8),
        )
        with pytest.raises(ValidationError):
            write_raster(gray, tmp_path / "img.ppm")

    def test_comment_in_header(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# a comment\n2 2\n255\n\x01\x02\x03\x04")
        write_world_file(world_file_path(path), GridSpec(2, 2, (0.0, 2.0), 1.0))
        back = read_raster(path)
        assert back.data.tolist() == [[1, 2], [3, 4]]


class TestF32:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        data = rng.normal(15.0, 5.0, size=(6, 4)).astype(np.float32)
        raster = GeoRaster(
            grid=GridSpec(4, 6, (100.0, 400.0), 30.0), data=data, nodata=-9999.0
        )
        path = tmp_path / "t.f32"
        write_raster(raster, path)
        back = read_raster(path)
        assert back.grid == raster.grid
        assert back.nodata == -9999.0
        assert (back.data == data).all()

    def test_no_nodata(self, tmp_path):
        raster = GeoRaster(
            grid=GridSpec(2, 2, (0.0, 60.0), 30.0),
            data=np.ones((2, 2), dtype=np.float32),
        )
        path = tmp_path / "t.f32"
        write_raster(raster, path)
        assert read_raster(path).nodata is None


class TestGeoTiff:
    def test_rgb_uncompressed(self, tmp_path):
        pixels = bytes(range(2 * 2 * 3))
        blob = build_tiff(2, 2, pixels, samples=3, compression=1)
        path = tmp_path / "t.tif"
        path.write_bytes(blob)
        raster = read_raster(path)
        assert raster.bands == 3
        assert raster.pixel_size == 0.1
        assert raster.origin == (0.0, 160.0)
        assert raster.data.ravel().tolist() == list(range(12))

    def test_gray_deflate(self, tmp_path):
        pixels = bytes([7, 8, 9, 10, 11, 12])
        blob = build_tiff(3, 2, pixels, samples=1, compression=8)
        path = tmp_path / "t.tif"
        path.write_bytes(blob)
        raster = read_raster(path)
        assert raster.bands == 1
        assert raster.data.ravel().tolist() == [7, 8, 9, 10, 11, 12]

    def test_tiled_rejected(self, tmp_path):
        blob = build_tiff(2, 2, bytes(12), tiled=True)
        path = tmp_path / "t.tif"
        path.write_bytes(blob)
        with pytest.raises(UnsupportedFormatError, match="tiled"):
            read_raster(path)

    def test_16bit_rejected(self, tmp_path):
        blob = build_tiff(2, 2, bytes(24), bits=16)
        path = tmp_path / "t.tif"
        path.write_bytes(blob)
        with pytest.raises(UnsupportedFormatError, match="bit depth"):
            read_raster(path)

    def test_lzw_rejected(self, tmp_path):
        blob = build_tiff(2, 2, bytes(12), compression=5)
        path = tmp_path / "t.tif"
        path.write_bytes(blob)
        with pytest.raises(UnsupportedFormatError, match="compression 5"):
            read_raster(path)

    def test_geotags_missing_falls_back_to_world_file(self, tmp_path):
        blob = build_tiff(2, 2, bytes(12), pixel_scale=None, tiepoint=None)
        path = tmp_path / "t.tif"
        path.write_bytes(blob)
        with pytest.raises(ValidationError, match="georeferencing"):
            read_raster(path)
        write_world_file(world_file_path(path), GridSpec(2, 2, (5.0, 9.0), 2.0))
        raster = read_raster(path)
        assert raster.origin == (5.0, 9.0)
        assert raster.pixel_size == 2.0


class TestTransforms:
    def test_pixel_world_round_trip(self):
        raster = GeoRaster(
            grid=GridSpec(40, 30, (2600000.0, 1200000.0), 0.1),
            data=np.zeros((30, 40, 3), dtype=np.uint8),
        )
        for row in range(0, 30, 7):
            for col in range(0, 40, 7):
                x, y = raster.pixel_to_world(row, col)
                assert raster.world_to_pixel(x, y) == (row, col)

    def test_unsupported_extension(self, tmp_path):
        with pytest.raises(UnsupportedFormatError):
            read_raster(tmp_path / "x.png")
