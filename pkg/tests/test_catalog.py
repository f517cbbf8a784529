from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest

from mock_stac import MockCatalogServer
from rhcd.catalog import CatalogItem, fetch_asset, search_catalog, select_latest
from rhcd.errors import NetworkError, ValidationError

TIME_RANGE = ("2020-01-01T00:00:00Z", "2025-01-01T00:00:00Z")


def feature(item_id, bbox, dt, hrefs):
    return {
        "id": item_id,
        "bbox": list(bbox),
        "properties": {"datetime": dt},
        "assets": {f"a{i}": {"href": h} for i, h in enumerate(hrefs)},
    }


class TestSearch:
    def test_intersecting_items_newest_first(self):
        with MockCatalogServer() as server:
            server.features = [
                feature("old", (0, 0, 10, 10), "2021-05-01T00:00:00Z", ["http://x/a"]),
                feature("new", (5, 5, 15, 15), "2023-05-01T00:00:00Z", ["http://x/b"]),
                feature("far", (100, 100, 110, 110), "2024-05-01T00:00:00Z", ["http://x/c"]),
            ]
            items = search_catalog(server.endpoint, (0, 0, 12, 12), TIME_RANGE, backoff_s=0.001)
        assert [it.item_id for it in items] == ["new", "old"]

    def test_no_intersection_empty(self):
        with MockCatalogServer() as server:
            server.features = [
                feature("a", (0, 0, 1, 1), "2022-01-01T00:00:00Z", ["http://x/a"])
            ]
            items = search_catalog(server.endpoint, (50, 50, 60, 60), TIME_RANGE, backoff_s=0.001)
        assert items == []

    def test_time_window_filter(self):
        with MockCatalogServer() as server:
            server.features = [
                feature("in", (0, 0, 1, 1), "2022-01-01T00:00:00Z", ["http://x/a"]),
                feature("out", (0, 0, 1, 1), "2010-01-01T00:00:00Z", ["http://x/b"]),
            ]
            items = search_catalog(server.endpoint, (0, 0, 1, 1), TIME_RANGE, backoff_s=0.001)
        assert [it.item_id for it in items] == ["in"]

    def test_three_failures_exhaust_retries(self):
        with MockCatalogServer() as server:
            server.fail_next = 3
            with pytest.raises(NetworkError, match="after 3 attempts"):
                search_catalog(server.endpoint, (0, 0, 1, 1), TIME_RANGE, backoff_s=0.001)
            assert server.request_count("/search") == 3

    def test_two_failures_then_success(self):
        with MockCatalogServer() as server:
            server.fail_next = 2
            server.features = [
                feature("a", (0, 0, 1, 1), "2022-01-01T00:00:00Z", ["http://x/a"])
            ]
            items = search_catalog(server.endpoint, (0, 0, 1, 1), TIME_RANGE, backoff_s=0.001)
            assert len(items) == 1
            assert server.request_count("/search") == 3

    def test_malformed_item_reports_index(self):
        with MockCatalogServer() as server:
            server.features = [
                feature("ok", (0, 0, 1, 1), "2022-01-01T00:00:00Z", ["http://x/a"]),
                {"id": "broken", "bbox": [0, 0, 1, 1], "properties": {}},
            ]
            with pytest.raises(ValidationError, match="index 1"):
                search_catalog(server.endpoint, (0, 0, 1, 1), TIME_RANGE, backoff_s=0.001)

    def test_file_scheme_manifest(self, tmp_path):
        manifest = tmp_path / "catalog.json"
        manifest.write_text(
            json.dumps(
                {"features": [feature("f", (0, 0, 2, 2), "2022-06-01T00:00:00Z", ["file:///x"])]}
            )
        )
        items = search_catalog(manifest.as_uri(), (0, 0, 1, 1), TIME_RANGE)
        assert [it.item_id for it in items] == ["f"]


def make_item(item_id, bbox=(0, 0, 1, 1), dt="2022-01-01T00:00:00+00:00", hrefs=("http://x/a",)):
    return CatalogItem(
        item_id=item_id,
        bbox=bbox,
        datetime=datetime.fromisoformat(dt),
        asset_hrefs=list(hrefs),
    )


class TestSelectLatest:
    def test_same_footprint_newest_kept(self):
        a = make_item("i2021", dt="2021-01-01T00:00:00+00:00")
        b = make_item("i2023", dt="2023-01-01T00:00:00+00:00")
        assert [it.item_id for it in select_latest([a, b])] == ["i2023"]

    def test_single_item_identity(self):
        a = make_item("only")
        assert select_latest([a]) == [a]

    def test_two_footprints_both_kept(self):
        items = [
            make_item("a1", bbox=(0, 0, 1, 1), dt="2021-01-01T00:00:00+00:00"),
            make_item("a2", bbox=(0, 0, 1, 1), dt="2023-01-01T00:00:00+00:00"),
            make_item("b", bbox=(5, 5, 6, 6), dt="2022-01-01T00:00:00+00:00"),
        ]
        kept = select_latest(items)
        assert {it.item_id for it in kept} == {"a2", "b"}

    def test_datetime_tie_breaks_to_greatest_id(self):
        a = make_item("aaa")
        b = make_item("zzz")
        assert [it.item_id for it in select_latest([a, b])] == ["zzz"]

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            select_latest([])


class TestFetch:
    def test_file_href_copied(self, tmp_path):
        src = tmp_path / "fixture.bin"
        src.write_bytes(b"\xab" * 1024)
        item = make_item("fixture.bin", hrefs=(src.as_uri(),))
        dest = fetch_asset(item, tmp_path / "dl")
        assert dest.name == "fixture.bin"
        assert dest.stat().st_size == 1024

    def test_http_fetch_and_cache_skip(self, tmp_path):
        with MockCatalogServer() as server:
            server.assets["blob"] = b"hello imagery"
            item = make_item("item.bin", hrefs=(server.asset_href("blob"),))
            dest = fetch_asset(item, tmp_path, backoff_s=0.001)
            assert dest.read_bytes() == b"hello imagery"
            assert server.request_count("/assets/") == 1
            again = fetch_asset(item, tmp_path, backoff_s=0.001)
            assert again == dest
            assert server.request_count("/assets/") == 1  # no re-download

    def test_size_mismatch_triggers_refetch(self, tmp_path):
        with MockCatalogServer() as server:
            server.assets["blob"] = b"0123456789"
            item = make_item("item.bin", hrefs=(server.asset_href("blob"),))
            dest = fetch_asset(item, tmp_path, backoff_s=0.001)
            dest.write_bytes(b"trunc")  # corrupt the cached copy
            fetch_asset(item, tmp_path, backoff_s=0.001)
            assert dest.read_bytes() == b"0123456789"
            assert server.request_count("/assets/") == 2

    def test_sidecar_assets_land_beside_primary(self, tmp_path):
        img = tmp_path / "t.ppm"
        wld = tmp_path / "t.wld"
        img.write_bytes(b"P6\n1 1\n255\nabc")
        wld.write_text("1\n0\n0\n-1\n0.5\n-0.5\n")
        item = make_item("tile_7", hrefs=(img.as_uri(), wld.as_uri()))
        dest = fetch_asset(item, tmp_path / "dl")
        assert dest.name == "tile_7.ppm"
        assert (tmp_path / "dl" / "tile_7.wld").exists()

    def test_unwritable_dest_raises(self, tmp_path):
        src = tmp_path / "x.bin"
        src.write_bytes(b"1")
        blocked = tmp_path / "not_a_dir"
        blocked.write_text("a file occupies the destination path")
        item = make_item("x.bin", hrefs=(src.as_uri(),))
        with pytest.raises(NetworkError, match="cannot"):
            fetch_asset(item, blocked)

    def test_invariants(self):
        with pytest.raises(ValidationError):
            make_item("bad-bbox", bbox=(1, 0, 0, 1))
        with pytest.raises(ValidationError):
            make_item("no-assets", hrefs=())
