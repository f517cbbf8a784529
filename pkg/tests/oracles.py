"""Independent brute-force reference implementations.

Everything here is deliberately naive pure Python (plus math.fsum for
exact sums): these are the oracles the package implementations are
checked against, so they must not share code with the package.
"""

from __future__ import annotations

import math


def point_in_ring_naive(x: float, y: float, ring) -> bool:
    """Scalar even-odd crossing test; ring is closed (first == last)."""
    inside = False
    for i in range(len(ring) - 1):
        x1, y1 = ring[i]
        x2, y2 = ring[i + 1]
        if (y1 > y) != (y2 > y):
            x_int = (x2 - x1) * (y - y1) / (y2 - y1) + x1
            if x < x_int:
                inside = not inside
    return inside


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg_sq
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def flat_cap_buffer_distance(p, line) -> float:
    """Effective distance of p from the flat-capped buffered polyline.

    The flat-cap, round-join buffer is, by construction, the union of
    the perpendicular offset rectangle of every segment plus a circular
    join fan at every interior vertex V: the sector of the disk at V
    lying ahead of the incoming segment's end plane and behind the
    outgoing segment's start plane. Membership at radius r is
    distance <= r under this metric (rectangle: perpendicular distance
    when the projection falls on the segment; fan: distance to V when
    both half-plane conditions hold).
    """
    px, py = p
    best = math.inf
    dirs = []
    for i in range(len(line) - 1):
        ax, ay = line[i]
        bx, by = line[i + 1]
        dx, dy = bx - ax, by - ay
        seg_sq = dx * dx + dy * dy
        if seg_sq == 0.0:
            dirs.append(None)
            continue
        norm = math.sqrt(seg_sq)
        dirs.append((dx / norm, dy / norm))
        t = ((px - ax) * dx + (py - ay) * dy) / seg_sq
        if 0.0 <= t <= 1.0:
            perp = abs((px - ax) * (-dy) + (py - ay) * dx) / norm
            best = min(best, perp)
    for i in range(1, len(line) - 1):  # interior vertices
        u1 = dirs[i - 1]
        u2 = dirs[i]
        if u1 is None or u2 is None:
            continue
        vx, vy = line[i]
        qx, qy = px - vx, py - vy
        if qx * u1[0] + qy * u1[1] >= 0.0 and qx * u2[0] + qy * u2[1] <= 0.0:
            best = min(best, math.hypot(qx, qy))
    return best


def near_cap_plane(p, line, radius: float, tol: float) -> bool:
    """True when p sits within tol of one of the two flat end-cap planes
    while close enough to the end vertex for the cap to matter."""
    px, py = p
    for end, nxt in ((line[0], line[1]), (line[-1], line[-2])):
        ex, ey = end
        nx_, ny_ = nxt
        ux, uy = nx_ - ex, ny_ - ey
        norm = math.hypot(ux, uy)
        if norm == 0.0:
            continue
        ux, uy = ux / norm, uy / norm
        along = (px - ex) * ux + (py - ey) * uy
        if abs(along) <= tol and math.hypot(px - ex, py - ey) <= radius + tol:
            return True
    return False


def amplitude_cell_loop(layers, nodata, min_valid: int):
    """Per-cell max-min over a list of 2-D value lists; None for nodata
    cells in the output."""
    h = len(layers[0])
    w = len(layers[0][0])
    out = [[None] * w for _ in range(h)]
    for r in range(h):
        for c in range(w):
            vals = []
            for layer in layers:
                v = layer[r][c]
                if nodata is not None and v == nodata:
                    continue
                if v != v:  # NaN
                    continue
                vals.append(v)
            if len(vals) >= min_valid:
                out[r][c] = max(vals) - min(vals)
    return out


def pearson_direct(xs, ys) -> float:
    """One-pass textbook formula with exact (fsum) accumulation."""
    n = len(xs)
    sx = math.fsum(xs)
    sy = math.fsum(ys)
    sxx = math.fsum(x * x for x in xs)
    syy = math.fsum(y * y for y in ys)
    sxy = math.fsum(x * y for x, y in zip(xs, ys))
    num = n * sxy - sx * sy
    den = math.sqrt((n * sxx - sx * sx) * (n * syy - sy * sy))
    return num / den


def confusion_counts(pred_pairs):
    """(predicted, actual) label pairs -> (tp, fp, tn, fn) with 'crack'
    as the positive class."""
    tp = fp = tn = fn = 0
    for predicted, actual in pred_pairs:
        if predicted == "crack" and actual == "crack":
            tp += 1
        elif predicted == "crack":
            fp += 1
        elif actual == "crack":
            fn += 1
        else:
            tn += 1
    return tp, fp, tn, fn


def rhcd_recount(classified, unit_of):
    """classified: (patch_id, label) pairs; unit_of: patch_id -> unit.

    Returns {unit: (n_total, n_crack, percent)} by plain counting.
    """
    totals: dict = {}
    cracks: dict = {}
    for patch_id, label in classified:
        unit = unit_of[patch_id]
        totals[unit] = totals.get(unit, 0) + 1
        if label == "crack":
            cracks[unit] = cracks.get(unit, 0) + 1
    return {
        unit: (totals[unit], cracks.get(unit, 0), 100.0 * cracks.get(unit, 0) / totals[unit])
        for unit in totals
    }


def top_flag_sort_oracle(values, p: float):
    """Indices flagged by sorting: threshold is the ceil(p% * N)-th
    largest value; everything >= it is flagged."""
    n = len(values)
    k = math.ceil(p / 100.0 * n)
    threshold = sorted(values, reverse=True)[k - 1]
    return {i for i, v in enumerate(values) if v >= threshold}
