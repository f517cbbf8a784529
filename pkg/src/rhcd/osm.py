"""OSM XML parsing and highway/rail extraction.

Accepts the node/way subset of OSM XML. Node coordinates may be given as
lat/lon or as pre-projected x/y attributes; values are used as-is (no
reprojection), so inputs must already share a metric CRS for downstream
geometry to be meaningful.
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from math import isfinite
from pathlib import Path
from typing import IO

from .errors import DanglingReferenceError, OsmParseError, ValidationError
from .geometry import mean_vertex_distance, polyline_length

logger = logging.getLogger(__name__)

DEFAULT_LANES = 2
LANE_MATCH_MAX_DIST_M = 20.0


@dataclass
class OsmWay:
    way_id: int
    node_refs: list[int]
    tags: dict[str, str]


@dataclass
class OsmNetwork:
    nodes: dict[int, tuple[float, float]]
    ways: list[OsmWay]


@dataclass
class RoadSegment:
    """A filtered way with resolved geometry, the spatial analysis unit."""

    id: int
    geometry: list[tuple[float, float]]
    lanes: int
    length_m: float
    tags: dict[str, str] = field(default_factory=dict)


@dataclass
class LaneSource:
    """External lane-count polylines to match onto segments."""

    features: list[tuple[list[tuple[float, float]], int]]  # (geometry, lanes)


def parse_osm_xml(source: str | Path | IO[bytes]) -> OsmNetwork:
    """Stream-parse an OSM XML document into an OsmNetwork.

    Memory stays proportional to the number of nodes/ways: elements are
    cleared as soon as they are consumed.
    """
    nodes: dict[int, tuple[float, float]] = {}
    ways: list[OsmWay] = []
    try:
        for _event, elem in ET.iterparse(source, events=("end",)):
            if elem.tag == "node":
                try:
                    nid = int(elem.attrib["id"])
                    if "x" in elem.attrib and "y" in elem.attrib:
                        x = float(elem.attrib["x"])
                        y = float(elem.attrib["y"])
                    else:
                        x = float(elem.attrib["lon"])
                        y = float(elem.attrib["lat"])
                except (KeyError, ValueError) as exc:
                    raise OsmParseError(f"bad node element: {exc}") from exc
                if not (isfinite(x) and isfinite(y)):
                    raise OsmParseError(f"non-finite coordinates on node {nid}")
                nodes[nid] = (x, y)
                elem.clear()
            elif elem.tag == "way":
                try:
                    wid = int(elem.attrib["id"])
                    refs = [int(nd.attrib["ref"]) for nd in elem.findall("nd")]
                except (KeyError, ValueError) as exc:
                    raise OsmParseError(f"bad way element: {exc}") from exc
                tags = {
                    t.attrib["k"]: t.attrib.get("v", "") for t in elem.findall("tag")
                }
                if len(refs) < 2:
                    raise OsmParseError(f"way {wid} has fewer than 2 node refs")
                ways.append(OsmWay(way_id=wid, node_refs=refs, tags=tags))
                elem.clear()
    except ET.ParseError as exc:
        line, col = exc.position
        raise OsmParseError(f"malformed XML at line {line}, column {col}") from exc

    for way in ways:
        missing = [r for r in way.node_refs if r not in nodes]
        if missing:
            raise DanglingReferenceError(
                f"way {way.way_id} references missing node(s) {missing}"
            )
    return OsmNetwork(nodes=nodes, ways=ways)


def _way_lanes(way: OsmWay) -> int:
    raw = way.tags.get("lanes")
    if raw is None:
        return DEFAULT_LANES
    try:
        lanes = int(raw)
    except ValueError:
        logger.warning(
            "way %d: non-numeric lanes tag %r, using default %d",
            way.way_id,
            raw,
            DEFAULT_LANES,
        )
        return DEFAULT_LANES
    if lanes < 1:
        logger.warning(
            "way %d: lanes tag %r below 1, using default %d",
            way.way_id,
            raw,
            DEFAULT_LANES,
        )
        return DEFAULT_LANES
    return lanes


def _way_to_segment(net: OsmNetwork, way: OsmWay) -> RoadSegment:
    geometry = [net.nodes[r] for r in way.node_refs]
    length = polyline_length(geometry)
    if length <= 0:
        raise ValidationError(f"way {way.way_id} has zero-length geometry")
    return RoadSegment(
        id=way.way_id,
        geometry=geometry,
        lanes=_way_lanes(way),
        length_m=length,
        tags=dict(way.tags),
    )


def extract_motorways(net: OsmNetwork) -> list[RoadSegment]:
    """highway=motorway ways excluding tunnel=yes, sorted by way id."""
    selected = [
        w
        for w in net.ways
        if w.tags.get("highway") == "motorway" and w.tags.get("tunnel") != "yes"
    ]
    selected.sort(key=lambda w: w.way_id)
    return [_way_to_segment(net, w) for w in selected]


def extract_rail_occluders(net: OsmNetwork) -> list[RoadSegment]:
    """railway=rail ways carried on bridges (bridge=yes), sorted by way id."""
    selected = [
        w
        for w in net.ways
        if w.tags.get("railway") == "rail" and w.tags.get("bridge") == "yes"
    ]
    selected.sort(key=lambda w: w.way_id)
    return [_way_to_segment(net, w) for w in selected]


def match_lanes(
    segments: list[RoadSegment],
    source: LaneSource,
    max_dist_m: float = LANE_MATCH_MAX_DIST_M,
) -> list[RoadSegment]:
    """Adopt lane counts from the nearest lane-source feature.

    Nearest = minimum mean vertex distance from the segment's vertices to
    the feature polyline, accepted only within max_dist_m. Ties keep the
    lowest feature index. Segments beyond the threshold are unchanged.
    """
    if not source.features:
        return list(segments)
    matched = []
    for seg in segments:
        best_idx = -1
        best_dist = float("inf")
        for idx, (geom, _lanes) in enumerate(source.features):
            d = mean_vertex_distance(seg.geometry, geom)
            if d < best_dist:
                best_dist = d
                best_idx = idx
        if best_dist <= max_dist_m:
            matched.append(replace(seg, lanes=source.features[best_idx][1]))
        else:
            matched.append(seg)
    return matched


# ---------------------------------------------------------------------------
# GeoJSON round-trip
# ---------------------------------------------------------------------------


def segments_to_geojson(segments: list[RoadSegment]) -> dict:
    """FeatureCollection of LineStrings; tags kept under a nested key so a
    tag named like a reserved property cannot collide."""
    features = []
    for seg in segments:
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[x, y] for x, y in seg.geometry],
                },
                "properties": {
                    "id": seg.id,
                    "lanes": seg.lanes,
                    "length_m": seg.length_m,
                    "tags": seg.tags,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def segments_from_geojson(doc: dict) -> list[RoadSegment]:
    segments = []
    for feat in doc.get("features", []):
        props = feat["properties"]
        geometry = [tuple(c) for c in feat["geometry"]["coordinates"]]
        segments.append(
            RoadSegment(
                id=int(props["id"]),
                geometry=geometry,
                lanes=int(props["lanes"]),
                length_m=float(props["length_m"]),
                tags=dict(props.get("tags", {})),
            )
        )
    return segments


def write_segments_geojson(segments: list[RoadSegment], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(segments_to_geojson(segments), sort_keys=True), encoding="utf-8"
    )


def read_segments_geojson(path: str | Path) -> list[RoadSegment]:
    return segments_from_geojson(json.loads(Path(path).read_text(encoding="utf-8")))


def lane_source_from_geojson(doc: dict) -> LaneSource:
    """LineString features with a `lanes` property."""
    features = []
    for feat in doc.get("features", []):
        geometry = [tuple(c) for c in feat["geometry"]["coordinates"]]
        lanes = int(feat["properties"]["lanes"])
        if lanes < 1:
            raise ValidationError(f"lane source feature with lanes={lanes}")
        features.append((geometry, lanes))
    return LaneSource(features=features)
