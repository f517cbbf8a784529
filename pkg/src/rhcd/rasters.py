"""Georeferenced raster carrier and file formats.

Supported formats:
  * PPM (P6) / PGM (P5), 8-bit binary, with an ESRI world file sidecar
    (``<stem>.wld``) carrying the affine transform. This is the portable
    interchange format: round-trips are bit-exact.
  * ``.f32`` single-band float sidecar rasters for temperature data:
    a small binary header (width, height, origin, pixel size, nodata)
    followed by row-major little-endian 32-bit floats.
  * GeoTIFF, read-only, restricted subset: 8-bit, striped, uncompressed
    or DEFLATE, RGB or single-band. Anything else raises
    UnsupportedFormatError naming the offending feature.

Grids are axis-aligned with square pixels; y decreases with row index
(origin is the upper-left corner of the upper-left pixel).
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UnsupportedFormatError, ValidationError


@dataclass(frozen=True)
class GridSpec:
    """Pixel grid geometry: dimensions plus the world anchoring."""

    width: int
    height: int
    origin: tuple[float, float]  # upper-left corner, world units
    pixel_size: float  # meters per pixel, square pixels

    def pixel_center_x(self) -> np.ndarray:
        ox, _ = self.origin
        return ox + (np.arange(self.width) + 0.5) * self.pixel_size

    def pixel_center_y(self) -> np.ndarray:
        _, oy = self.origin
        return oy - (np.arange(self.height) + 0.5) * self.pixel_size

    def bbox(self) -> tuple[float, float, float, float]:
        ox, oy = self.origin
        return (
            ox,
            oy - self.height * self.pixel_size,
            ox + self.width * self.pixel_size,
            oy,
        )


@dataclass
class GeoRaster:
    """An axis-aligned georeferenced pixel grid.

    data is (height, width, 3) uint8 for RGB imagery, (height, width)
    uint8 for gray, or (height, width) float32 for temperature bands.
    """

    grid: GridSpec
    data: np.ndarray
    nodata: float | None = None

    def __post_init__(self) -> None:
        if self.grid.width <= 0 or self.grid.height <= 0:
            raise ValidationError("raster dimensions must be positive")
        if self.grid.pixel_size <= 0:
            raise ValidationError("pixel_size must be positive")
        exp = (self.grid.height, self.grid.width)
        if self.data.shape[:2] != exp:
            raise ValidationError(
                f"data shape {self.data.shape} does not match grid {exp}"
            )

    @property
    def width(self) -> int:
        return self.grid.width

    @property
    def height(self) -> int:
        return self.grid.height

    @property
    def bands(self) -> int:
        return 3 if self.data.ndim == 3 else 1

    @property
    def pixel_size(self) -> float:
        return self.grid.pixel_size

    @property
    def origin(self) -> tuple[float, float]:
        return self.grid.origin

    def pixel_to_world(self, row: int, col: int) -> tuple[float, float]:
        """World coordinates of the pixel center."""
        ox, oy = self.grid.origin
        return (
            ox + (col + 0.5) * self.grid.pixel_size,
            oy - (row + 0.5) * self.grid.pixel_size,
        )

    def world_to_pixel(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) of the pixel containing the world point."""
        ox, oy = self.grid.origin
        col = int(np.floor((x - ox) / self.grid.pixel_size))
        row = int(np.floor((oy - y) / self.grid.pixel_size))
        return row, col


# ---------------------------------------------------------------------------
# World files
# ---------------------------------------------------------------------------


def world_file_path(raster_path: Path) -> Path:
    return raster_path.with_suffix(".wld")


def write_world_file(path: Path, grid: GridSpec) -> None:
    """Six-line ESRI world file; lines 5/6 are the UL pixel *center*."""
    ox, oy = grid.origin
    ps = grid.pixel_size
    lines = [ps, 0.0, 0.0, -ps, ox + ps / 2.0, oy - ps / 2.0]
    path.write_text("".join(f"{v!r}\n" for v in lines), encoding="ascii")


def read_world_file(path: Path) -> tuple[float, tuple[float, float]]:
    """Returns (pixel_size, origin upper-left corner)."""
    try:
        vals = [float(t) for t in path.read_text(encoding="ascii").split()]
    except FileNotFoundError:
        raise ValidationError(f"missing world file sidecar: {path}") from None
    if len(vals) != 6:
        raise ValidationError(f"world file {path} must have 6 numbers")
    a, rot1, rot2, e, cx, cy = vals
    if rot1 != 0.0 or rot2 != 0.0:
        raise UnsupportedFormatError("rotated/sheared geotransform not supported")
    if abs(a) != abs(e):
        raise UnsupportedFormatError("non-square pixels not supported")
    if a <= 0 or e >= 0:
        raise UnsupportedFormatError("unexpected axis orientation in world file")
    return a, (cx - a / 2.0, cy + a / 2.0)


# ---------------------------------------------------------------------------
# PPM / PGM
# ---------------------------------------------------------------------------


def _read_pnm_tokens(blob: bytes, count: int) -> tuple[list[int], int]:
    """Read `count` whitespace/comment-separated ASCII ints; returns offset."""
    tokens: list[int] = []
    i = 0
    while len(tokens) < count:
        if i >= len(blob):
            raise ValidationError("truncated PNM header")
        c = blob[i : i + 1]
        if c == b"#":
            while i < len(blob) and blob[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(blob) and not blob[j : j + 1].isspace():
                j += 1
            tok = blob[i:j]
            if not tok.isdigit():
                raise ValidationError(f"bad PNM header token {tok!r}")
            tokens.append(int(tok))
            i = j
    return tokens, i + 1  # single whitespace byte terminates the header


def _read_pnm(path: Path) -> np.ndarray:
    blob = path.read_bytes()
    magic = blob[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormatError(f"not a binary PGM/PPM file: {path}")
    (w, h, maxval), offset = _read_pnm_tokens(blob[2:], 3)
    offset += 2
    if maxval != 255:
        raise UnsupportedFormatError(f"PNM maxval {maxval} not supported (8-bit only)")
    bands = 3 if magic == b"P6" else 1
    need = w * h * bands
    pixels = blob[offset : offset + need]
    if len(pixels) != need:
        raise ValidationError(f"truncated pixel data in {path}")
    arr = np.frombuffer(pixels, dtype=np.uint8)
    return arr.reshape((h, w, 3)) if bands == 3 else arr.reshape((h, w))


def _write_pnm(path: Path, data: np.ndarray) -> None:
    if data.dtype != np.uint8:
        raise ValidationError("PNM output requires uint8 data")
    h, w = data.shape[:2]
    magic = b"P6" if data.ndim == 3 else b"P5"
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(data).tobytes())


# ---------------------------------------------------------------------------
# Float sidecar rasters (.f32)
# ---------------------------------------------------------------------------

_F32_MAGIC = b"F32R"
_F32_HEADER = struct.Struct("<4sIIdddBf")


def _write_f32(path: Path, raster: GeoRaster) -> None:
    if raster.data.ndim != 2:
        raise ValidationError(".f32 format is single-band only")
    has_nodata = raster.nodata is not None
    header = _F32_HEADER.pack(
        _F32_MAGIC,
        raster.width,
        raster.height,
        raster.origin[0],
        raster.origin[1],
        raster.pixel_size,
        1 if has_nodata else 0,
        raster.nodata if has_nodata else 0.0,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(raster.data, dtype="<f4").tobytes())


def _read_f32(path: Path) -> GeoRaster:
    blob = path.read_bytes()
    if blob[:4] != _F32_MAGIC:
        raise UnsupportedFormatError(f"not a .f32 raster: {path}")
    magic, w, h, ox, oy, ps, has_nodata, nodata = _F32_HEADER.unpack_from(blob)
    data = np.frombuffer(blob, dtype="<f4", count=w * h, offset=_F32_HEADER.size)
    if data.size != w * h:
        raise ValidationError(f"truncated pixel data in {path}")
    return GeoRaster(
        grid=GridSpec(w, h, (ox, oy), ps),
        data=data.reshape((h, w)).copy(),
        nodata=float(nodata) if has_nodata else None,
    )


# ---------------------------------------------------------------------------
# GeoTIFF (restricted read-only subset)
# ---------------------------------------------------------------------------

_TIFF_TYPE_SIZE = {1: 1, 2: 1, 3: 2, 4: 4, 5: 8, 11: 4, 12: 8}
_TIFF_TYPE_FMT = {1: "B", 3: "H", 4: "I", 11: "f", 12: "d"}


def _read_ifd_values(blob: bytes, bo: str, type_: int, count: int, vofs: int) -> list:
    size = _TIFF_TYPE_SIZE.get(type_)
    if size is None:
        raise UnsupportedFormatError(f"TIFF field type {type_} not supported")
    total = size * count
    if total <= 4:
        raw = blob[vofs : vofs + total]
    else:
        (ptr,) = struct.unpack(bo + "I", blob[vofs : vofs + 4])
        raw = blob[ptr : ptr + total]
    if type_ == 2:
        return [raw.rstrip(b"\x00").decode("ascii", "replace")]
    fmt = _TIFF_TYPE_FMT.get(type_)
    if fmt is None:
        raise UnsupportedFormatError(f"TIFF field type {type_} not supported")
    return list(struct.unpack(bo + fmt * count, raw))


def _read_geotiff(path: Path) -> GeoRaster:
    blob = path.read_bytes()
    if blob[:2] == b"II":
        bo = "<"
    elif blob[:2] == b"MM":
        bo = ">"
    else:
        raise UnsupportedFormatError(f"not a TIFF file: {path}")
    (magic,) = struct.unpack(bo + "H", blob[2:4])
    if magic == 43:
        raise UnsupportedFormatError("BigTIFF not supported")
    if magic != 42:
        raise UnsupportedFormatError(f"bad TIFF magic {magic}")
    (ifd_ofs,) = struct.unpack(bo + "I", blob[4:8])

    (n_entries,) = struct.unpack(bo + "H", blob[ifd_ofs : ifd_ofs + 2])
    tags: dict[int, list] = {}
    for k in range(n_entries):
        eofs = ifd_ofs + 2 + 12 * k
        tag, type_, count = struct.unpack(bo + "HHI", blob[eofs : eofs + 8])
        tags[tag] = _read_ifd_values(blob, bo, type_, count, eofs + 8)

    if 322 in tags or 323 in tags:
        raise UnsupportedFormatError("tiled TIFF not supported (striped only)")
    width = int(tags[256][0])
    height = int(tags[257][0])
    bits = tags.get(258, [1])
    if any(int(b) != 8 for b in bits):
        raise UnsupportedFormatError(f"bit depth {bits} not supported (8-bit only)")
    compression = int(tags.get(259, [1])[0])
    if compression not in (1, 8, 32946):
        raise UnsupportedFormatError(f"TIFF compression {compression} not supported")
    samples = int(tags.get(277, [1])[0])
    if samples not in (1, 3):
        raise UnsupportedFormatError(
            f"{samples} samples/pixel not supported (1 or 3 only)"
        )
    if int(tags.get(284, [1])[0]) != 1:
        raise UnsupportedFormatError("planar configuration 2 not supported")
    if int(tags.get(317, [1])[0]) != 1:
        raise UnsupportedFormatError("TIFF predictor not supported")
    if 338 in tags:
        raise UnsupportedFormatError("alpha/extra samples not supported")

    offsets = [int(v) for v in tags[273]]
    counts = [int(v) for v in tags[279]]
    raw = bytearray()
    for ofs, cnt in zip(offsets, counts):
        chunk = bytes(blob[ofs : ofs + cnt])
        raw += zlib.decompress(chunk) if compression != 1 else chunk
    need = width * height * samples
    if len(raw) < need:
        raise ValidationError(f"truncated TIFF strip data in {path}")
    arr = np.frombuffer(bytes(raw[:need]), dtype=np.uint8)
    data = arr.reshape((height, width, 3)) if samples == 3 else arr.reshape(
        (height, width)
    )

    if 33550 in tags and 33922 in tags:
        sx, sy = float(tags[33550][0]), float(tags[33550][1])
        if abs(sx - sy) > 1e-12 * max(sx, sy):
            raise UnsupportedFormatError("non-square pixels not supported")
        i, j, _k, x, y, _z = (float(v) for v in tags[33922][:6])
        origin = (x - i * sx, y + j * sy)
        pixel_size = sx
    else:
        wld = world_file_path(path)
        if not wld.exists():
            raise ValidationError(
                f"GeoTIFF {path} lacks georeferencing tags and no {wld.name} sidecar"
            )
        pixel_size, origin = read_world_file(wld)

    return GeoRaster(grid=GridSpec(width, height, origin, pixel_size), data=data.copy())


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def read_raster(path: str | Path) -> GeoRaster:
    """Read a georeferenced raster; format chosen by file extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".ppm", ".pgm"):
        data = _read_pnm(path)
        pixel_size, origin = read_world_file(world_file_path(path))
        return GeoRaster(
            grid=GridSpec(data.shape[1], data.shape[0], origin, pixel_size), data=data
        )
    if suffix == ".f32":
        return _read_f32(path)
    if suffix in (".tif", ".tiff"):
        return _read_geotiff(path)
    raise UnsupportedFormatError(f"unsupported raster extension {suffix!r}: {path}")


def write_raster(raster: GeoRaster, path: str | Path) -> None:
    """Write a raster plus its world file; format chosen by extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".ppm", ".pgm"):
        if suffix == ".ppm" and raster.bands != 3:
            raise ValidationError("PPM output requires a 3-band raster")
        if suffix == ".pgm" and raster.bands != 1:
            raise ValidationError("PGM output requires a single-band raster")
        _write_pnm(path, raster.data)
        write_world_file(world_file_path(path), raster.grid)
        return
    if suffix == ".f32":
        _write_f32(path, raster)
        return
    raise UnsupportedFormatError(f"unsupported output extension {suffix!r}: {path}")
