"""Pipeline configuration: JSON file plus CLI overrides.

The effective configuration is hashed into every run manifest so reruns
can tell whether any parameter changed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ValidationError


@dataclass
class PipelineConfig:
    crs_note: str = "coordinates are used as-is; inputs must share a metric CRS"
    lane_width_m: float = 3.5
    patch_px: int = 50
    min_road_fraction: float = 0.5
    buffer_extra_m: float = 0.0
    rail_buffer_m: float = 3.0
    top_percentile: float = 5.0
    weight_by_length: bool = False
    parallelism: int = 1
    projected: bool = True
    classifier: dict = field(default_factory=lambda: {"builtin": {}})
    external_timeout_s: float = 60.0
    retry_backoff_s: float = 0.25

    # paths / endpoints
    workdir: str = "out"
    osm_path: str | None = None
    lanes_path: str | None = None
    catalog_endpoint: str | None = None
    bbox: list[float] | None = None
    time_range: list[str] | None = None
    tv_path: str | None = None
    lst_dir: str | None = None
    lst_min_valid: int = 2

    def validate(self) -> None:
        positive = {
            "lane_width_m": self.lane_width_m,
            "patch_px": self.patch_px,
            "rail_buffer_m": self.rail_buffer_m,
            "parallelism": self.parallelism,
            "external_timeout_s": self.external_timeout_s,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValidationError(f"config: {name} must be positive, got {value}")
        if self.buffer_extra_m < 0:
            raise ValidationError("config: buffer_extra_m must be >= 0")
        if not 0.0 < self.top_percentile < 100.0:
            raise ValidationError(
                f"config: top_percentile must be in (0,100), got {self.top_percentile}"
            )
        if not 0.0 <= self.min_road_fraction <= 1.0:
            raise ValidationError(
                f"config: min_road_fraction must be in [0,1], got {self.min_road_fraction}"
            )
        if not isinstance(self.classifier, dict) or not (
            "builtin" in self.classifier or "exec" in self.classifier
        ):
            raise ValidationError(
                "config: classifier must be {'builtin': {...}} or {'exec': 'command'}"
            )

    def config_hash(self) -> str:
        canonical = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str | Path | None, overrides: dict | None = None) -> PipelineConfig:
    """Config file values first, then non-None overrides on top."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    known = set(PipelineConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    cfg = PipelineConfig(**data)
    cfg.validate()
    return cfg
