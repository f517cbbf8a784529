"""Mask orthophotos to the road corridor and cut them into patches.

Patches are fixed-size, grid-aligned, non-overlapping windows anchored at
the raster origin. A window is kept iff at least min_road_fraction of its
pixels are road; every patch is assigned to exactly one analysis unit.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corridors import CorridorPolygon, PixelMask
from .errors import GridMismatchError, ValidationError
from .geometry import point_in_ring, point_polyline_distance
from .rasters import GeoRaster, GridSpec, read_raster, write_raster

logger = logging.getLogger(__name__)

PATCH_PX = 50


@dataclass
class Patch:
    patch_id: str  # "<tile_id>:<row>:<col>" in patch-grid coordinates
    unit_id: int
    origin: tuple[float, float]  # upper-left corner, world units
    pixels: np.ndarray  # (patch_px, patch_px, 3) uint8
    road_fraction: float


def mask_raster(raster: GeoRaster, mask: PixelMask) -> GeoRaster:
    """Zero out (black) all pixels where the mask is clear."""
    if raster.grid != mask.grid:
        raise GridMismatchError(f"raster/mask grids differ: {raster.grid} vs {mask.grid}")
    data = raster.data.copy()
    data[~mask.bits] = 0
    return GeoRaster(grid=raster.grid, data=data, nodata=raster.nodata)


def _assign_unit(
    center: tuple[float, float], units: list[CorridorPolygon]
) -> int:
    """Nearest centerline among corridors containing the center; falls back
    to the globally nearest centerline. Ties go to the smallest unit id."""
    containing = [
        u for u in units if point_in_ring(center[0], center[1], u.ring)
    ]
    candidates = containing if containing else units
    best = min(
        candidates,
        key=lambda u: (point_polyline_distance(center, u.centerline), u.unit_id),
    )
    return best.unit_id


def tile_patches(
    raster: GeoRaster,
    mask: PixelMask,
    units: list[CorridorPolygon],
    min_road_fraction: float,
    tile_id: str,
    patch_px: int = PATCH_PX,
) -> list[Patch]:
    """Cut the masked raster into patch_px x patch_px patches, row-major.

    Remainder rows/columns that do not fill a whole window are dropped
    (with a warning). road_fraction is the exact popcount ratio of mask
    bits inside the window.
    """
    if not units:
        raise ValidationError("tile_patches requires at least one analysis unit")
    if raster.grid != mask.grid:
        raise GridMismatchError(f"raster/mask grids differ: {raster.grid} vs {mask.grid}")
    if raster.bands != 3:
        raise ValidationError("tiling expects 3-band imagery")
    if not 0.0 <= min_road_fraction <= 1.0:
        raise ValidationError(f"min_road_fraction {min_road_fraction} outside [0,1]")

    h, w = raster.height, raster.width
    n_rows, n_cols = h // patch_px, w // patch_px
    dropped_rows, dropped_cols = h - n_rows * patch_px, w - n_cols * patch_px
    if dropped_rows or dropped_cols:
        logger.warning(
            "tile %s: dropping %d remainder pixel rows and %d columns",
            tile_id,
            dropped_rows,
            dropped_cols,
        )
    if n_rows == 0 or n_cols == 0:
        return []

    bits = mask.bits[: n_rows * patch_px, : n_cols * patch_px]
    counts = bits.reshape(n_rows, patch_px, n_cols, patch_px).sum(axis=(1, 3))
    per_window = patch_px * patch_px
    ox, oy = raster.grid.origin
    ps = raster.grid.pixel_size

    patches: list[Patch] = []
    for r in range(n_rows):
        for c in range(n_cols):
            frac = int(counts[r, c]) / per_window
            if frac < min_road_fraction:
                continue
            window = raster.data[
                r * patch_px : (r + 1) * patch_px, c * patch_px : (c + 1) * patch_px
            ]
            origin = (ox + c * patch_px * ps, oy - r * patch_px * ps)
            center = (
                origin[0] + patch_px * ps / 2.0,
                origin[1] - patch_px * ps / 2.0,
            )
            patches.append(
                Patch(
                    patch_id=f"{tile_id}:{r}:{c}",
                    unit_id=_assign_unit(center, units),
                    origin=origin,
                    pixels=window.copy(),
                    road_fraction=frac,
                )
            )
    return patches


# ---------------------------------------------------------------------------
# Patch index persistence
# ---------------------------------------------------------------------------


def safe_filename(patch_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", patch_id)


def write_patch_index(
    patches: list[Patch], out_dir: str | Path, pixel_size: float | dict[str, float]
) -> Path:
    """Write one PPM per patch plus an NDJSON index; returns the index path.

    pixel_size is a single value or a mapping keyed by the tile id prefix
    of the patch ids (tiles may differ in ground resolution).
    """
    out_dir = Path(out_dir)
    images = out_dir / "images"
    images.mkdir(parents=True, exist_ok=True)
    index_path = out_dir / "patch_index.ndjson"
    with open(index_path, "w", encoding="utf-8") as fh:
        for p in patches:
            fname = f"images/{safe_filename(p.patch_id)}.ppm"
            ps = (
                pixel_size[p.patch_id.rsplit(":", 2)[0]]
                if isinstance(pixel_size, dict)
                else pixel_size
            )
            grid = GridSpec(p.pixels.shape[1], p.pixels.shape[0], p.origin, ps)
            write_raster(GeoRaster(grid=grid, data=p.pixels), out_dir / fname)
            rec = {
                "patch_id": p.patch_id,
                "unit_id": p.unit_id,
                "origin": [p.origin[0], p.origin[1]],
                "road_fraction": p.road_fraction,
                "file": fname,
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return index_path


@dataclass
class PatchIndexRecord:
    patch_id: str
    unit_id: int
    origin: tuple[float, float]
    road_fraction: float
    file: str


def read_patch_index(index_path: str | Path) -> list[PatchIndexRecord]:
    records = []
    with open(index_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                records.append(
                    PatchIndexRecord(
                        patch_id=rec["patch_id"],
                        unit_id=int(rec["unit_id"]),
                        origin=(rec["origin"][0], rec["origin"][1]),
                        road_fraction=float(rec["road_fraction"]),
                        file=rec["file"],
                    )
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ValidationError(
                    f"bad patch index line {line_no} in {index_path}: {exc}"
                ) from exc
    return records


def load_patch(record: PatchIndexRecord, index_dir: str | Path) -> Patch:
    raster = read_raster(Path(index_dir) / record.file)
    return Patch(
        patch_id=record.patch_id,
        unit_id=record.unit_id,
        origin=record.origin,
        pixels=raster.data,
        road_fraction=record.road_fraction,
    )
