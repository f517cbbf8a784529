"""Covariate computation and correlation against the crack-density index.

Covers the long-term land-surface-temperature amplitude raster (per-cell
max minus min over a layer stack), corridor-mean sampling of rasters,
traffic-volume attribution by nearest polyline, min-max normalization
for plotting, and a numerically stable Pearson correlation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corridors import CorridorPolygon, rasterize
from .errors import GridMismatchError, ValidationError
from .geometry import mean_vertex_distance
from .rasters import GeoRaster

COVARIATE_LT_LST_A = "lt_lst_a"
COVARIATE_TRAFFIC = "traffic_volume"

TV_MATCH_MAX_DIST_M = 20.0


@dataclass
class TemperatureStack:
    """Single-band float layers sharing one grid (nominally 30 m cells)."""

    layers: list[GeoRaster]
    timestamps: list[str] | None = None

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValidationError("temperature stack needs at least one layer")
        grid = self.layers[0].grid
        for layer in self.layers[1:]:
            if layer.grid != grid:
                raise GridMismatchError("stack layers do not share a grid")
        nodatas = {layer.nodata for layer in self.layers}
        if len(nodatas) > 1:
            raise ValidationError(f"inconsistent nodata sentinels in stack: {nodatas}")


@dataclass
class CovariateRow:
    unit_id: int
    value: float


@dataclass
class CorrelationReport:
    r: float
    n: int
    covariate_kind: str
    normalization: str = "none"

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "covariate_kind": self.covariate_kind,
            "normalization": self.normalization,
        }


def lt_lst_a(stack: TemperatureStack, min_valid: int = 2) -> GeoRaster:
    """Per-cell max minus min over layers with valid observations.

    Cells with fewer than min_valid valid (non-nodata) observations get
    the nodata sentinel in the output.
    """
    grid = stack.layers[0].grid
    nodata = stack.layers[0].nodata
    data = np.stack([layer.data.astype(np.float64) for layer in stack.layers])
    if nodata is None:
        valid = ~np.isnan(data)
    else:
        valid = (data != nodata) & ~np.isnan(data)
    counts = valid.sum(axis=0)
    vmax = np.where(valid, data, -np.inf).max(axis=0)
    vmin = np.where(valid, data, np.inf).min(axis=0)
    out_nodata = nodata if nodata is not None else float("nan")
    amplitude = np.where(counts >= min_valid, vmax - vmin, out_nodata)
    return GeoRaster(
        grid=grid, data=amplitude.astype(np.float32), nodata=out_nodata
    )


def _valid_mask(raster: GeoRaster) -> np.ndarray:
    data = raster.data
    if raster.nodata is None or math.isnan(raster.nodata):
        return ~np.isnan(data)
    return (data != raster.nodata) & ~np.isnan(data)


def sample_raster_per_unit(
    raster: GeoRaster, corridors: list[CorridorPolygon]
) -> list[CovariateRow]:
    """Mean of cell values whose centers fall inside each unit corridor.

    Nodata cells are ignored; units with no contributing cells are
    omitted from the output.
    """
    valid = _valid_mask(raster)
    rows = []
    for corridor in corridors:
        inside = rasterize([corridor], raster.grid).bits & valid
        if not inside.any():
            continue
        value = float(raster.data[inside].astype(np.float64).mean())
        rows.append(CovariateRow(unit_id=corridor.unit_id, value=value))
    return rows


def join_traffic_volume(
    segments,
    tv_features: list[tuple[list[tuple[float, float]], float]],
    max_dist_m: float = TV_MATCH_MAX_DIST_M,
) -> list[CovariateRow]:
    """Attribute vehicles/day from the nearest traffic-volume polyline.

    Nearest = minimum mean vertex distance from the segment centerline to
    the feature, accepted within max_dist_m; unmatched units are omitted.
    """
    if not tv_features:
        return []
    rows = []
    for seg in segments:
        best_value = None
        best_dist = float("inf")
        for geom, value in tv_features:
            d = mean_vertex_distance(seg.geometry, geom)
            if d < best_dist:
                best_dist = d
                best_value = value
        if best_dist <= max_dist_m:
            rows.append(CovariateRow(unit_id=seg.id, value=float(best_value)))
    return rows


def min_max_normalize(values: list[float]) -> list[float]:
    """(v - min) / (max - min); errors when all values are equal."""
    lo, hi = min(values), max(values)
    if hi == lo:
        raise ValidationError("min-max normalization undefined for constant values")
    return [(v - lo) / (hi - lo) for v in values]


def pearson(
    xs: list[float],
    ys: list[float],
    covariate_kind: str = "",
    normalization: str = "none",
) -> CorrelationReport:
    """Product-moment correlation, two-pass (centered) computation."""
    n = len(xs)
    if n != len(ys):
        raise ValidationError(f"length mismatch: {n} vs {len(ys)}")
    if n < 2:
        raise ValidationError("correlation needs at least 2 samples")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise ValidationError("correlation undefined for zero-variance input")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return CorrelationReport(
        r=r, n=n, covariate_kind=covariate_kind, normalization=normalization
    )


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def tv_features_from_geojson(doc: dict) -> list[tuple[list[tuple[float, float]], float]]:
    """LineString features carrying a `dtv` (vehicles/day) property."""
    features = []
    for feat in doc.get("features", []):
        geometry = [tuple(c) for c in feat["geometry"]["coordinates"]]
        features.append((geometry, float(feat["properties"]["dtv"])))
    return features


def read_tv_geojson(path: str | Path) -> list[tuple[list[tuple[float, float]], float]]:
    return tv_features_from_geojson(json.loads(Path(path).read_text(encoding="utf-8")))


def write_scatter_csv(
    path: str | Path,
    unit_ids: list[int],
    rhcd_norm: list[float],
    covariate_norm: list[float],
) -> None:
    lines = ["unit_id,rhcd_norm,covariate_norm"]
    for uid, a, b in zip(unit_ids, rhcd_norm, covariate_norm):
        lines.append(f"{uid},{a!r},{b!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
