"""Deterministic synthetic scenes for desk-scale pipeline verification.

A scene renders asphalt-textured roads (uniform gray plus seeded noise)
on a flat background and paints dark crack polylines fully inside chosen
patch cells, so ground truth is exact by construction. Alongside the
imagery the scene emits everything a full pipeline run needs: an OSM
extract, a file:// catalog manifest, traffic-volume features, a
temperature stack, and per-cell truth labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import LABEL_CRACK, LABEL_NO_CRACK
from .corridors import corridor_radius, rasterize, buffer_polyline
from .errors import SceneSpecError
from .osm import RoadSegment, write_segments_geojson
from .geometry import polyline_length
from .rasters import GeoRaster, GridSpec, write_raster
from .tiling import PATCH_PX

ROAD_GRAY = 128
RAIL_GRAY = 170
NOISE_SIGMA = 4.0

ROAD_WAY_ID_BASE = 100
RAIL_WAY_ID_BASE = 500


@dataclass
class CrackStyle:
    width_px: int = 2
    darkness_delta: int = 30

    def __post_init__(self) -> None:
        if self.darkness_delta <= 0:
            raise SceneSpecError("darkness_delta must be positive")
        if self.width_px < 1:
            raise SceneSpecError("width_px must be >= 1")


@dataclass
class SceneRoad:
    polyline: list[tuple[float, float]]
    lanes: int
    planted_crack_tiles: list[tuple[int, int]] = field(default_factory=list)
    dtv: float | None = None  # vehicles/day for the TV layer


@dataclass
class SceneSpec:
    seed: int
    extent_m: tuple[float, float]
    roads: list[SceneRoad]
    rail_bridges: list[list[tuple[float, float]]] = field(default_factory=list)
    background_gray: int = 96
    crack_style: CrackStyle = field(default_factory=CrackStyle)
    pixel_size: float = 0.1
    lst_pixel_m: float = 5.0
    lst_layers: int = 3

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "extent_m": list(self.extent_m),
                "roads": [
                    {
                        "polyline": [list(p) for p in r.polyline],
                        "lanes": r.lanes,
                        "planted_crack_tiles": [list(t) for t in r.planted_crack_tiles],
                        "dtv": r.dtv,
                    }
                    for r in self.roads
                ],
                "rail_bridges": [[list(p) for p in rb] for rb in self.rail_bridges],
                "background_gray": self.background_gray,
                "crack_style": {
                    "width_px": self.crack_style.width_px,
                    "darkness_delta": self.crack_style.darkness_delta,
                },
                "pixel_size": self.pixel_size,
                "lst_pixel_m": self.lst_pixel_m,
                "lst_layers": self.lst_layers,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SceneSpec":
        doc = json.loads(text)
        return cls(
            seed=int(doc["seed"]),
            extent_m=tuple(doc["extent_m"]),
            roads=[
                SceneRoad(
                    polyline=[tuple(p) for p in r["polyline"]],
                    lanes=int(r["lanes"]),
                    planted_crack_tiles=[tuple(t) for t in r["planted_crack_tiles"]],
                    dtv=r.get("dtv"),
                )
                for r in doc["roads"]
            ],
            rail_bridges=[[tuple(p) for p in rb] for rb in doc.get("rail_bridges", [])],
            background_gray=int(doc.get("background_gray", 96)),
            crack_style=CrackStyle(**doc.get("crack_style", {})),
            pixel_size=float(doc.get("pixel_size", 0.1)),
            lst_pixel_m=float(doc.get("lst_pixel_m", 5.0)),
            lst_layers=int(doc.get("lst_layers", 3)),
        )


@dataclass
class Scene:
    spec: SceneSpec
    imagery: GeoRaster
    truth: dict[tuple[int, int], str]  # patch grid (row, col) -> label
    segments: list[RoadSegment]
    rails: list[RoadSegment]
    tv_features: list[tuple[list[tuple[float, float]], float]]
    lst_layers: list[GeoRaster]
    osm_xml: str


def _scene_grid(spec: SceneSpec) -> GridSpec:
    w_px = round(spec.extent_m[0] / spec.pixel_size)
    h_px = round(spec.extent_m[1] / spec.pixel_size)
    return GridSpec(w_px, h_px, (0.0, spec.extent_m[1]), spec.pixel_size)


def _paint_crack(
    imagery: np.ndarray,
    road_bits: np.ndarray,
    rng: np.random.Generator,
    cell: tuple[int, int],
    style: CrackStyle,
    patch_px: int,
) -> None:
    """Draw one dark shallow-diagonal crack line inside a patch cell.

    The line runs nearly across the cell with a small vertical drift so
    its bounding box stays strongly elongated; all painted pixels must be
    road surface.
    """
    row, col = cell
    r0, c0 = row * patch_px, col * patch_px
    margin = 5
    drift = int(rng.integers(2, 4))  # end-to-end cross-axis drift in px
    mid = int(rng.integers(margin + drift, patch_px - margin - drift))
    if rng.integers(0, 2):  # shallow line along the column axis
        ai, aj = mid - drift, margin
        bi, bj = mid + drift, patch_px - 1 - margin
    else:
        ai, aj = margin, mid - drift
        bi, bj = patch_px - 1 - margin, mid + drift

    # distance from each in-cell pixel (i=row, j=col) to the segment
    ii, jj = np.mgrid[0:patch_px, 0:patch_px]
    di, dj = bi - ai, bj - aj
    seg_sq = di * di + dj * dj
    t = np.clip(((ii - ai) * di + (jj - aj) * dj) / seg_sq, 0.0, 1.0)
    dist = np.hypot(ii - (ai + t * di), jj - (aj + t * dj))
    line = dist <= style.width_px / 2.0

    window_road = road_bits[r0 : r0 + patch_px, c0 : c0 + patch_px]
    if not window_road[line].all():
        raise SceneSpecError(
            f"planted crack at patch cell {cell} leaves the road surface"
        )
    window = imagery[r0 : r0 + patch_px, c0 : c0 + patch_px]
    darkened = np.clip(
        window[line].astype(np.int16) - style.darkness_delta, 0, 255
    ).astype(np.uint8)
    window[line] = darkened


def generate_scene(spec: SceneSpec) -> Scene:
    """Render a scene deterministically from its spec.

    Truth labels depend only on the planted coordinates, never on the
    noise seed.
    """
    if not spec.roads:
        raise SceneSpecError("scene needs at least one road")
    grid = _scene_grid(spec)
    n_rows, n_cols = grid.height // PATCH_PX, grid.width // PATCH_PX

    corridors = [
        buffer_polyline(road.polyline, corridor_radius(road.lanes), unit_id=i)
        for i, road in enumerate(spec.roads)
    ]
    road_mask = rasterize(corridors, grid)
    rail_mask = None
    if spec.rail_bridges:
        rail_corridors = [
            buffer_polyline(rb, 3.0, unit_id=i) for i, rb in enumerate(spec.rail_bridges)
        ]
        rail_mask = rasterize(rail_corridors, grid)

    rng = np.random.default_rng(spec.seed)
    gray = np.full((grid.height, grid.width), spec.background_gray, dtype=np.float64)
    noise = rng.normal(0.0, NOISE_SIGMA, size=gray.shape)
    gray[road_mask.bits] = ROAD_GRAY + noise[road_mask.bits]
    imagery = np.clip(np.rint(gray), 0, 255).astype(np.uint8)
    imagery = np.repeat(imagery[:, :, None], 3, axis=2)

    planted: set[tuple[int, int]] = set()
    for road in spec.roads:
        for cell in road.planted_crack_tiles:
            row, col = cell
            if not (0 <= row < n_rows and 0 <= col < n_cols):
                raise SceneSpecError(f"planted crack cell {cell} outside patch grid")
            if rail_mask is not None:
                r0, c0 = row * PATCH_PX, col * PATCH_PX
                if rail_mask.bits[r0 : r0 + PATCH_PX, c0 : c0 + PATCH_PX].any():
                    raise SceneSpecError(
                        f"planted crack cell {cell} is occluded by a rail bridge"
                    )
            _paint_crack(
                imagery, road_mask.bits, rng, cell, spec.crack_style, PATCH_PX
            )
            planted.add((row, col))

    if rail_mask is not None:
        imagery[rail_mask.bits] = RAIL_GRAY

    truth = {
        (r, c): LABEL_CRACK if (r, c) in planted else LABEL_NO_CRACK
        for r in range(n_rows)
        for c in range(n_cols)
    }

    segments = [
        RoadSegment(
            id=ROAD_WAY_ID_BASE + i,
            geometry=list(road.polyline),
            lanes=road.lanes,
            length_m=polyline_length(road.polyline),
            tags={"highway": "motorway", "lanes": str(road.lanes)},
        )
        for i, road in enumerate(spec.roads)
    ]
    rails = [
        RoadSegment(
            id=RAIL_WAY_ID_BASE + i,
            geometry=list(rb),
            lanes=1,
            length_m=polyline_length(rb),
            tags={"railway": "rail", "bridge": "yes"},
        )
        for i, rb in enumerate(spec.rail_bridges)
    ]
    tv_features = [
        (
            list(road.polyline),
            float(road.dtv) if road.dtv is not None else 15000.0 + 7000.0 * i,
        )
        for i, road in enumerate(spec.roads)
    ]
    lst_layers = _generate_lst(spec)

    return Scene(
        spec=spec,
        imagery=GeoRaster(grid=grid, data=imagery),
        truth=truth,
        segments=segments,
        rails=rails,
        tv_features=tv_features,
        lst_layers=lst_layers,
        osm_xml=_scene_osm_xml(segments, rails),
    )


def _generate_lst(spec: SceneSpec) -> list[GeoRaster]:
    """Layer stack whose per-cell amplitude varies smoothly with y, so
    different roads see different values."""
    w = max(1, round(spec.extent_m[0] / spec.lst_pixel_m))
    h = max(1, round(spec.extent_m[1] / spec.lst_pixel_m))
    grid = GridSpec(w, h, (0.0, spec.extent_m[1]), spec.lst_pixel_m)
    ys = grid.pixel_center_y()
    layers = []
    for k in range(spec.lst_layers):
        row_vals = 10.0 + 0.05 * ys + k * (4.0 + 0.03 * ys)
        data = np.tile(row_vals[:, None], (1, w)).astype(np.float32)
        layers.append(GeoRaster(grid=grid, data=data, nodata=None))
    return layers


def _scene_osm_xml(segments: list[RoadSegment], rails: list[RoadSegment]) -> str:
    """Minimal OSM XML document with pre-projected x/y node coordinates."""
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', '<osm version="0.6">']
    node_id = 1000
    way_chunks = []
    for seg in segments + rails:
        refs = []
        for x, y in seg.geometry:
            node_id += 1
            lines.append(f'  <node id="{node_id}" x="{x!r}" y="{y!r}"/>')
            refs.append(node_id)
        chunk = [f'  <way id="{seg.id}">']
        chunk.extend(f'    <nd ref="{r}"/>' for r in refs)
        chunk.extend(
            f'    <tag k="{k}" v="{v}"/>' for k, v in sorted(seg.tags.items())
        )
        chunk.append("  </way>")
        way_chunks.append("\n".join(chunk))
    lines.extend(way_chunks)
    lines.append("</osm>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Scene persistence
# ---------------------------------------------------------------------------

SCENE_TILE_ID = "tile_000"
SCENE_DATETIME = "2023-06-15T10:00:00Z"


def save_scene(scene: Scene, out_dir: str | Path) -> Path:
    """Write all scene artifacts; returns a run-all-ready config path."""
    out = Path(out_dir)
    (out / "imagery").mkdir(parents=True, exist_ok=True)
    (out / "lst").mkdir(exist_ok=True)

    (out / "scene.json").write_text(scene.spec.to_json(), encoding="utf-8")
    (out / "osm.xml").write_text(scene.osm_xml, encoding="utf-8")

    image_path = out / "imagery" / f"{SCENE_TILE_ID}.ppm"
    write_raster(scene.imagery, image_path)

    bbox = scene.imagery.grid.bbox()
    catalog = {
        "features": [
            {
                "id": SCENE_TILE_ID,
                "bbox": list(bbox),
                "properties": {"datetime": SCENE_DATETIME},
                "assets": {
                    "image": {"href": image_path.resolve().as_uri()},
                    "world": {
                        "href": image_path.with_suffix(".wld").resolve().as_uri()
                    },
                },
            }
        ]
    }
    (out / "catalog.json").write_text(
        json.dumps(catalog, sort_keys=True, indent=2), encoding="utf-8"
    )

    with open(out / "truth.ndjson", "w", encoding="utf-8") as fh:
        for (r, c), label in sorted(scene.truth.items()):
            fh.write(
                json.dumps(
                    {"patch_id": f"{SCENE_TILE_ID}:{r}:{c}", "label": label},
                    sort_keys=True,
                )
                + "\n"
            )

    write_segments_geojson(scene.segments, out / "segments.geojson")

    tv = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[x, y] for x, y in geom],
                },
                "properties": {"dtv": dtv},
            }
            for geom, dtv in scene.tv_features
        ],
    }
    (out / "tv.geojson").write_text(json.dumps(tv, sort_keys=True), encoding="utf-8")

    for k, layer in enumerate(scene.lst_layers):
        write_raster(layer, out / "lst" / f"layer_{k:03d}.f32")

    config = {
        "osm_path": str((out / "osm.xml").resolve()),
        "catalog_endpoint": (out / "catalog.json").resolve().as_uri(),
        "bbox": list(bbox),
        "time_range": ["2020-01-01T00:00:00Z", "2030-01-01T00:00:00Z"],
        "tv_path": str((out / "tv.geojson").resolve()),
        "lst_dir": str((out / "lst").resolve()),
        "workdir": str((out / "out").resolve()),
        "projected": True,
    }
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, sort_keys=True, indent=2), encoding="utf-8")
    return config_path


# ---------------------------------------------------------------------------
# Canned specs
# ---------------------------------------------------------------------------


def demo_scene_spec() -> SceneSpec:
    """Four 100 m segments with planted crack densities 0/10/25/50%.

    Each road sits centered in one patch-cell row with 2 lanes (corridor
    half-width 3.5 m), so exactly its own row of 20 cells passes the
    default 0.5 road-fraction cut: 20 patches per segment.
    """
    extent = (100.0, 160.0)
    planted = {
        4: [],
        12: [3, 14],
        20: [2, 6, 10, 14, 18],
        28: [0, 2, 4, 6, 8, 10, 12, 14, 16, 18],
    }
    dtvs = {4: 8000.0, 12: 21000.0, 20: 35000.0, 28: 52000.0}
    cell_m = PATCH_PX * 0.1
    roads = []
    for row, cols in planted.items():
        y = extent[1] - cell_m * row - cell_m / 2.0
        roads.append(
            SceneRoad(
                polyline=[(0.0, y), (extent[0], y)],
                lanes=2,
                planted_crack_tiles=[(row, c) for c in cols],
                dtv=dtvs[row],
            )
        )
    return SceneSpec(seed=20240612, extent_m=extent, roads=roads)


def random_scene_spec(seed: int) -> SceneSpec:
    """Small random scene: 1-3 horizontal roads on distinct cell rows with
    random planted cracks. Used by the oracle-based verification suite."""
    rng = np.random.default_rng(seed)
    extent = (50.0, 80.0)  # 10 x 16 patch cells at 10 cm pixels
    n_rows = int(extent[1] // (PATCH_PX * 0.1))
    n_cols = int(extent[0] // (PATCH_PX * 0.1))
    cell_m = PATCH_PX * 0.1
    n_roads = int(rng.integers(1, 4))
    rows = rng.choice(np.arange(1, n_rows - 1), size=n_roads, replace=False)
    roads = []
    for row in sorted(int(r) for r in rows):
        y = extent[1] - cell_m * row - cell_m / 2.0
        n_cracks = int(rng.integers(0, n_cols // 2 + 1))
        cols = rng.choice(np.arange(n_cols), size=n_cracks, replace=False)
        roads.append(
            SceneRoad(
                polyline=[(0.0, y), (extent[0], y)],
                lanes=2,
                planted_crack_tiles=[(row, int(c)) for c in sorted(cols)],
            )
        )
    return SceneSpec(seed=seed, extent_m=extent, roads=roads)
