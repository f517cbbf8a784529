"""Catalog client: discover and fetch orthophoto assets.

Speaks a minimal STAC-like contract: GET {endpoint}/search?bbox=...&datetime=...
returning {"features": [{"id", "bbox", "properties": {"datetime"},
"assets": {...}}]}. A local catalog is a file:// URL pointing at a
manifest JSON with the identical schema.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlparse
from urllib.request import url2pathname

import requests

from .errors import NetworkError, ValidationError

logger = logging.getLogger(__name__)

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_S = 0.25

BBox = tuple[float, float, float, float]


@dataclass
class CatalogItem:
    item_id: str
    bbox: BBox
    datetime: datetime
    asset_hrefs: list[str]

    def __post_init__(self) -> None:
        xmin, ymin, xmax, ymax = self.bbox
        if not (xmin < xmax and ymin < ymax):
            raise ValidationError(f"item {self.item_id}: degenerate bbox {self.bbox}")
        if not self.asset_hrefs:
            raise ValidationError(f"item {self.item_id}: no asset hrefs")


def _parse_datetime(value: str) -> datetime:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


_IMAGE_SUFFIXES = (".ppm", ".pgm", ".tif", ".tiff", ".f32")


def _href_order(href: str) -> tuple[bool, str]:
    # image payloads sort before sidecars so the primary asset is the raster
    return (Path(urlparse(href).path).suffix.lower() not in _IMAGE_SUFFIXES, href)


def _parse_items(doc: dict) -> list[CatalogItem]:
    items = []
    for idx, feat in enumerate(doc.get("features", [])):
        try:
            bbox = tuple(float(v) for v in feat["bbox"])
            hrefs = [a["href"] for a in feat["assets"].values()]
            items.append(
                CatalogItem(
                    item_id=str(feat["id"]),
                    bbox=bbox,  # type: ignore[arg-type]
                    datetime=_parse_datetime(feat["properties"]["datetime"]),
                    asset_hrefs=sorted(hrefs, key=_href_order),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed catalog item at index {idx}: {exc}") from exc
    return items


def _bbox_intersects(a: BBox, b: BBox) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])


def _get_with_retries(
    url: str, params: dict, backoff_s: float, attempts: int
) -> requests.Response:
    last = "no attempt made"
    for k in range(attempts):
        if k > 0:
            time.sleep(backoff_s * (2 ** (k - 1)))
        try:
            resp = requests.get(url, params=params, timeout=30)
        except requests.RequestException as exc:
            last = str(exc)
            logger.warning("catalog request failed (attempt %d): %s", k + 1, exc)
            continue
        if resp.status_code == 200:
            return resp
        last = f"HTTP {resp.status_code}"
        logger.warning("catalog request got %s (attempt %d)", last, k + 1)
    raise NetworkError(f"catalog search failed after {attempts} attempts: {last}")


def search_catalog(
    endpoint: str,
    bbox: BBox,
    time_range: tuple[str, str],
    backoff_s: float = RETRY_BACKOFF_S,
    attempts: int = RETRY_ATTEMPTS,
) -> list[CatalogItem]:
    """Items intersecting bbox with datetime in [start, end], newest first.

    Filtering is applied client-side regardless of what the server does,
    so a dumb manifest server is a valid catalog.
    """
    start = _parse_datetime(time_range[0])
    end = _parse_datetime(time_range[1])
    if endpoint.startswith("file://"):
        manifest = Path(url2pathname(urlparse(endpoint).path))
        try:
            doc = json.loads(manifest.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise NetworkError(f"catalog manifest not found: {manifest}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"catalog manifest is not valid JSON: {exc}") from exc
    else:
        params = {
            "bbox": ",".join(repr(v) for v in bbox),
            "datetime": f"{time_range[0]}/{time_range[1]}",
        }
        resp = _get_with_retries(
            endpoint.rstrip("/") + "/search", params, backoff_s, attempts
        )
        try:
            doc = resp.json()
        except ValueError as exc:
            raise ValidationError(f"catalog response is not valid JSON: {exc}") from exc

    items = [
        it
        for it in _parse_items(doc)
        if _bbox_intersects(it.bbox, bbox) and start <= it.datetime <= end
    ]
    items.sort(key=lambda it: (it.datetime, it.item_id), reverse=True)
    return items


def select_latest(items: list[CatalogItem]) -> list[CatalogItem]:
    """Keep only the newest item per identical bbox footprint.

    Ties on datetime break toward the lexicographically greatest item id.
    """
    if not items:
        raise ValidationError("select_latest requires a non-empty item list")
    best: dict[BBox, CatalogItem] = {}
    for it in items:
        cur = best.get(it.bbox)
        if cur is None or (it.datetime, it.item_id) > (cur.datetime, cur.item_id):
            best[it.bbox] = it
    out = list(best.values())
    out.sort(key=lambda it: (it.datetime, it.item_id), reverse=True)
    return out


def _dest_name(item_id: str, href: str, primary: bool) -> str:
    """Primary asset lands at <item_id>[.ext]; sidecars swap in their own
    extension so e.g. a world file rides along next to its image."""
    href_suffix = Path(urlparse(href).path).suffix
    base = Path(item_id)
    if primary:
        return item_id if base.suffix else item_id + href_suffix
    return (base.stem if base.suffix else item_id) + href_suffix


def _fetch_one(href: str, dest: Path, backoff_s: float, attempts: int) -> None:
    parsed = urlparse(href)
    if parsed.scheme not in ("file", "http", "https"):
        raise ValidationError(f"unsupported asset scheme in {href}")
    try:
        tmp_fd, tmp_name = tempfile.mkstemp(prefix=f".{dest.name}.", dir=dest.parent)
    except OSError as exc:
        raise NetworkError(f"cannot write to {dest.parent} for {href}: {exc}") from exc
    os.close(tmp_fd)
    tmp = Path(tmp_name)
    try:
        if parsed.scheme == "file":
            src = Path(url2pathname(parsed.path))
            with open(tmp, "wb") as out, open(src, "rb") as inp:
                shutil.copyfileobj(inp, out)
        else:
            resp = _get_with_retries(href, {}, backoff_s, attempts)
            tmp.write_bytes(resp.content)
        os.replace(tmp, dest)
    except OSError as exc:
        raise NetworkError(f"failed to fetch {href}: {exc}") from exc
    finally:
        tmp.unlink(missing_ok=True)


_fetch_locks: dict[str, threading.Lock] = {}
_fetch_locks_guard = threading.Lock()


def fetch_asset(
    item: CatalogItem,
    dest_dir: str | Path,
    backoff_s: float = RETRY_BACKOFF_S,
    attempts: int = RETRY_ATTEMPTS,
) -> Path:
    """Download all assets of an item into dest_dir; returns the primary path.

    Writes are atomic (temp file + rename). A completion marker records the
    byte length of every asset; when the marker and lengths match, the
    fetch is skipped entirely (no network traffic).
    """
    dest_dir = Path(dest_dir)
    marker = dest_dir / f".{item.item_id}.fetched.json"

    with _fetch_locks_guard:
        lock = _fetch_locks.setdefault(str(marker), threading.Lock())
    with lock:
        names = [
            _dest_name(item.item_id, href, primary=(i == 0))
            for i, href in enumerate(item.asset_hrefs)
        ]
        primary = dest_dir / names[0]
        if marker.exists():
            try:
                recorded = json.loads(marker.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                recorded = None
            if recorded and all(
                (dest_dir / name).exists()
                and (dest_dir / name).stat().st_size == size
                for name, size in recorded.items()
            ):
                logger.debug("item %s already fetched, skipping", item.item_id)
                return primary

        try:
            dest_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise NetworkError(f"cannot create asset directory {dest_dir}: {exc}") from exc
        sizes = {}
        for href, name in zip(item.asset_hrefs, names):
            dest = dest_dir / name
            _fetch_one(href, dest, backoff_s, attempts)
            sizes[name] = dest.stat().st_size
        marker.write_text(json.dumps(sizes, sort_keys=True), encoding="utf-8")
        return primary
