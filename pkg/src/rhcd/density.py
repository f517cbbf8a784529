"""Per-unit Relative Highway Crack Density aggregation.

RHCD of a unit is 100 * (crack-labeled patches) / (total patches). Units
with zero patches are omitted rather than reported as 0%: no imagery
evidence is not the same as crack-free.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

from .classify import LABEL_CRACK, Classification
from .errors import ValidationError
from .osm import RoadSegment
from .tiling import PatchIndexRecord


@dataclass
class RhcdRecord:
    unit_id: int
    n_total: int
    n_crack: int
    rhcd_percent: float
    length_m: float = 0.0
    top_flag: bool = False


def aggregate_rhcd(
    classifications: list[Classification],
    patch_index: list[PatchIndexRecord],
    lengths: Mapping[int, float] | None = None,
) -> list[RhcdRecord]:
    """Count classified patches per unit and compute the percentage.

    Every classification must reference a patch in the index (the index
    carries the unit assignment). Output is sorted by unit id.
    """
    unit_of = {rec.patch_id: rec.unit_id for rec in patch_index}
    totals: dict[int, int] = {}
    cracks: dict[int, int] = {}
    for cls in classifications:
        unit = unit_of.get(cls.patch_id)
        if unit is None:
            raise ValidationError(
                f"classification references unknown patch {cls.patch_id!r}"
            )
        totals[unit] = totals.get(unit, 0) + 1
        if cls.label == LABEL_CRACK:
            cracks[unit] = cracks.get(unit, 0) + 1
    records = []
    for unit in sorted(totals):
        n_total = totals[unit]
        n_crack = cracks.get(unit, 0)
        records.append(
            RhcdRecord(
                unit_id=unit,
                n_total=n_total,
                n_crack=n_crack,
                rhcd_percent=100.0 * n_crack / n_total,
                length_m=float(lengths.get(unit, 0.0)) if lengths else 0.0,
            )
        )
    return records


def flag_top_percentile(
    records: list[RhcdRecord], p: float, weight_by_length: bool = False
) -> list[RhcdRecord]:
    """Flag the top p% of records by RHCD value (nearest-rank threshold).

    Unweighted: the threshold is the ceil(p% * N)-th largest value, so
    with distinct values exactly that many records are flagged; ties at
    the threshold are all flagged. Length-weighted: the threshold is the
    smallest value v such that records with rhcd >= v carry at least p%
    of the total length.
    """
    if not records:
        raise ValidationError("flag_top_percentile requires records")
    if not 0.0 < p < 100.0:
        raise ValidationError(f"percentile {p} outside (0, 100)")

    by_value = sorted(records, key=lambda r: r.rhcd_percent, reverse=True)
    if weight_by_length:
        total = sum(r.length_m for r in by_value)
        if total <= 0:
            raise ValidationError("length-weighted flagging needs positive lengths")
        target = p / 100.0 * total
        acc = 0.0
        threshold = by_value[0].rhcd_percent
        for r in by_value:
            acc += r.length_m
            threshold = r.rhcd_percent
            if acc >= target:
                break
    else:
        k = math.ceil(p / 100.0 * len(by_value))
        threshold = by_value[k - 1].rhcd_percent

    return [replace(r, top_flag=r.rhcd_percent >= threshold) for r in records]


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def records_to_geojson(
    records: list[RhcdRecord], segments: list[RoadSegment]
) -> dict:
    """Join RHCD records onto their segment centerlines."""
    seg_by_id = {s.id: s for s in segments}
    features = []
    for rec in records:
        seg = seg_by_id.get(rec.unit_id)
        if seg is None:
            raise ValidationError(f"no segment geometry for unit {rec.unit_id}")
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[x, y] for x, y in seg.geometry],
                },
                "properties": {
                    "unit_id": rec.unit_id,
                    "n_total": rec.n_total,
                    "n_crack": rec.n_crack,
                    "rhcd_percent": rec.rhcd_percent,
                    "length_m": rec.length_m,
                    "top_flag": rec.top_flag,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def write_records_geojson(
    records: list[RhcdRecord], segments: list[RoadSegment], path: str | Path
) -> None:
    Path(path).write_text(
        json.dumps(records_to_geojson(records, segments), sort_keys=True),
        encoding="utf-8",
    )


def write_records_csv(records: list[RhcdRecord], path: str | Path) -> None:
    """CSV for the segment-length versus RHCD diagnostic scatter."""
    lines = ["unit_id,length_m,n_total,n_crack,rhcd_percent,top_flag"]
    for r in records:
        lines.append(
            f"{r.unit_id},{r.length_m!r},{r.n_total},{r.n_crack},"
            f"{r.rhcd_percent!r},{str(r.top_flag).lower()}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_records_csv(path: str | Path) -> list[RhcdRecord]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    records = []
    for line in lines[1:]:
        unit_id, length_m, n_total, n_crack, rhcd_percent, top_flag = line.split(",")
        records.append(
            RhcdRecord(
                unit_id=int(unit_id),
                n_total=int(n_total),
                n_crack=int(n_crack),
                rhcd_percent=float(rhcd_percent),
                length_m=float(length_m),
                top_flag=top_flag == "true",
            )
        )
    return records
