"""Planar geometry primitives shared across modules.

All coordinates are (x, y) in a common metric CRS; no geodesic math here.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

Point = tuple[float, float]
Polyline = Sequence[Point]


def polyline_length(line: Polyline) -> float:
    """Sum of vertex-to-vertex Euclidean distances."""
    return math.fsum(
        math.hypot(line[i + 1][0] - line[i][0], line[i + 1][1] - line[i][1])
        for i in range(len(line) - 1)
    )


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the closed segment a-b."""
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg_sq
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_polyline_distance(p: Point, line: Polyline) -> float:
    """Distance from p to the nearest point of the polyline."""
    if len(line) == 1:
        return math.hypot(p[0] - line[0][0], p[1] - line[0][1])
    return min(
        point_segment_distance(p, line[i], line[i + 1]) for i in range(len(line) - 1)
    )


def mean_vertex_distance(line_a: Polyline, line_b: Polyline) -> float:
    """Mean, over the vertices of line_a, of the distance to line_b.

    Asymmetric on purpose: used to match a segment's vertices against
    candidate source polylines (lane source, traffic-volume features).
    """
    return math.fsum(point_polyline_distance(v, line_b) for v in line_a) / len(line_a)


def point_in_ring(x: float, y: float, ring: Polyline) -> bool:
    """Even-odd rule test against a closed ring (first vertex == last)."""
    inside = False
    n = len(ring) - 1  # last vertex repeats the first
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        if (y1 > y) != (y2 > y):
            x_int = (x2 - x1) * (y - y1) / (y2 - y1) + x1
            if x < x_int:
                inside = not inside
    return inside


def ring_area(ring: Polyline) -> float:
    """Unsigned shoelace area of a closed ring."""
    acc = 0.0
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        acc += x1 * y2 - x2 * y1
    return abs(acc) / 2.0


def bbox_of(points: Polyline) -> tuple[float, float, float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def bboxes_intersect(
    a: tuple[float, float, float, float], b: tuple[float, float, float, float]
) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])
