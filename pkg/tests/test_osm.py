from __future__ import annotations

import io
import json
import xml.dom.minidom

import pytest

from rhcd.errors import DanglingReferenceError, OsmParseError
from rhcd.osm import (
    LaneSource,
    extract_motorways,
    extract_rail_occluders,
    match_lanes,
    parse_osm_xml,
    read_segments_geojson,
    segments_from_geojson,
    segments_to_geojson,
    write_segments_geojson,
)

FIXTURE_4N_1W = b"""<?xml version="1.0"?>
<osm>
  <!-- a comment the parser must skip -->
  <node id="1" x="0.0" y="0.0"/>
  <node id="2" x="100.0" y="0.0"/>
  <node id="3" x="200.0" y="50.0"/>
  <node id="4" x="300.0" y="50.0"/>
  <way id="10">
    <nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/>
    <tag k="highway" v="motorway"/>
    <tag k="ref" v="A1"/>
  </way>
</osm>
"""


def five_way_fixture() -> bytes:
    """3 motorways (one a tunnel), 1 residential, 1 rail bridge."""
    nodes = "".join(
        f'<node id="{i}" x="{i * 10.0}" y="{(i % 3) * 5.0}"/>' for i in range(1, 7)
    )
    ways = """
    <way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="motorway"/><tag k="lanes" v="3"/></way>
    <way id="2"><nd ref="2"/><nd ref="3"/><tag k="highway" v="motorway"/><tag k="tunnel" v="yes"/></way>
    <way id="3"><nd ref="3"/><nd ref="4"/><tag k="highway" v="motorway"/><tag k="lanes" v="2;3"/></way>
    <way id="4"><nd ref="4"/><nd ref="5"/><tag k="highway" v="residential"/></way>
    <way id="5"><nd ref="5"/><nd ref="6"/><tag k="railway" v="rail"/><tag k="bridge" v="yes"/></way>
    """
    return f"<osm>{nodes}{ways}</osm>".encode()


class TestParse:
    def test_small_fixture_counts_and_tags(self):
        net = parse_osm_xml(io.BytesIO(FIXTURE_4N_1W))
        assert len(net.nodes) == 4
        assert len(net.ways) == 1
        way = net.ways[0]
        assert way.way_id == 10
        assert way.node_refs == [1, 2, 3, 4]
        assert way.tags == {"highway": "motorway", "ref": "A1"}

    def test_empty_document(self):
        net = parse_osm_xml(io.BytesIO(b"<osm/>"))
        assert net.nodes == {}
        assert net.ways == []

    def test_dangling_reference(self):
        doc = b'<osm><node id="1" x="0" y="0"/><way id="7"><nd ref="1"/><nd ref="99"/></way></osm>'
        with pytest.raises(DanglingReferenceError, match="way 7.*99"):
            parse_osm_xml(io.BytesIO(doc))

    def test_malformed_xml_reports_line(self):
        doc = b'<osm>\n<node id="1" x="0" y="0">\n</osm>'
        with pytest.raises(OsmParseError, match="line 3"):
            parse_osm_xml(io.BytesIO(doc))

    def test_latlon_attributes_accepted(self):
        doc = b'<osm><node id="1" lat="47.0" lon="8.0"/><node id="2" lat="47.1" lon="8.1"/><way id="1"><nd ref="1"/><nd ref="2"/></way></osm>'
        net = parse_osm_xml(io.BytesIO(doc))
        assert net.nodes[1] == (8.0, 47.0)  # (x, y) = (lon, lat)

    def test_single_ref_way_rejected(self):
        doc = b'<osm><node id="1" x="0" y="0"/><way id="3"><nd ref="1"/></way></osm>'
        with pytest.raises(OsmParseError, match="way 3"):
            parse_osm_xml(io.BytesIO(doc))

    def test_counts_match_dom_reference_parse(self):
        blob = five_way_fixture()
        net = parse_osm_xml(io.BytesIO(blob))
        dom = xml.dom.minidom.parseString(blob.decode())
        assert len(net.nodes) == len(dom.getElementsByTagName("node"))
        assert len(net.ways) == len(dom.getElementsByTagName("way"))


class TestExtract:
    def test_motorway_filtering(self):
        net = parse_osm_xml(io.BytesIO(five_way_fixture()))
        segments = extract_motorways(net)
        assert [s.id for s in segments] == [1, 3]
        for s in segments:
            assert s.tags.get("highway") == "motorway"
            assert s.tags.get("tunnel") != "yes"

    def test_tunnel_excluded(self):
        doc = b'<osm><node id="1" x="0" y="0"/><node id="2" x="1" y="0"/><way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="motorway"/><tag k="tunnel" v="yes"/></way></osm>'
        assert extract_motorways(parse_osm_xml(io.BytesIO(doc))) == []

    def test_lanes_parsed_and_defaulted(self):
        net = parse_osm_xml(io.BytesIO(five_way_fixture()))
        segments = extract_motorways(net)
        assert segments[0].lanes == 3  # lanes="3"
        assert segments[1].lanes == 2  # lanes="2;3" is non-numeric

    def test_length_matches_vertex_distances(self):
        net = parse_osm_xml(io.BytesIO(FIXTURE_4N_1W))
        seg = extract_motorways(net)[0]
        # 100 + hypot(100, 50) + 100
        expected = 100.0 + (100.0**2 + 50.0**2) ** 0.5 + 100.0
        assert abs(seg.length_m - expected) <= 1e-6 * expected

    def test_rail_occluders(self):
        net = parse_osm_xml(io.BytesIO(five_way_fixture()))
        rails = extract_rail_occluders(net)
        assert [r.id for r in rails] == [5]

    def test_rail_without_bridge_excluded(self):
        doc = b'<osm><node id="1" x="0" y="0"/><node id="2" x="1" y="0"/><way id="1"><nd ref="1"/><nd ref="2"/><tag k="railway" v="rail"/></way></osm>'
        assert extract_rail_occluders(parse_osm_xml(io.BytesIO(doc))) == []

    def test_empty_network_gives_empty_lists(self):
        net = parse_osm_xml(io.BytesIO(b"<osm/>"))
        assert extract_motorways(net) == []
        assert extract_rail_occluders(net) == []

    def test_filter_soundness_exhaustive(self):
        net = parse_osm_xml(io.BytesIO(five_way_fixture()))
        ids = {s.id for s in extract_motorways(net)}
        for way in net.ways:
            should = way.tags.get("highway") == "motorway" and way.tags.get("tunnel") != "yes"
            assert (way.way_id in ids) == should


class TestMatchLanes:
    def make_segment(self):
        net = parse_osm_xml(
            io.BytesIO(
                b'<osm><node id="1" x="0" y="0"/><node id="2" x="100" y="0"/>'
                b'<way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="motorway"/></way></osm>'
            )
        )
        return extract_motorways(net)

    def test_overlapping_source_adopted(self):
        segments = self.make_segment()
        source = LaneSource(features=[([(0.0, 0.0), (100.0, 0.0)], 3)])
        assert match_lanes(segments, source)[0].lanes == 3

    def test_empty_source_unchanged(self):
        segments = self.make_segment()
        assert match_lanes(segments, LaneSource(features=[]))[0].lanes == 2

    def test_far_source_ignored(self):
        segments = self.make_segment()
        # constant 50 m offset: mean vertex distance is exactly 50 m
        source = LaneSource(features=[([(0.0, 50.0), (100.0, 50.0)], 5)])
        assert match_lanes(segments, source)[0].lanes == 2

    def test_nearest_wins(self):
        segments = self.make_segment()
        source = LaneSource(
            features=[
                ([(0.0, 10.0), (100.0, 10.0)], 5),
                ([(0.0, 1.0), (100.0, 1.0)], 4),
            ]
        )
        assert match_lanes(segments, source)[0].lanes == 4


class TestGeoJsonRoundTrip:
    def test_round_trip_exact(self, tmp_path):
        net = parse_osm_xml(io.BytesIO(five_way_fixture()))
        segments = extract_motorways(net)
        path = tmp_path / "segments.geojson"
        write_segments_geojson(segments, path)
        back = read_segments_geojson(path)
        assert len(back) == len(segments)
        for a, b in zip(segments, back):
            assert a.id == b.id and a.lanes == b.lanes and a.tags == b.tags
            for (x1, y1), (x2, y2) in zip(a.geometry, b.geometry):
                assert abs(x1 - x2) <= 1e-9 and abs(y1 - y2) <= 1e-9

    def test_tag_named_like_reserved_property_survives(self):
        net = parse_osm_xml(
            io.BytesIO(
                b'<osm><node id="1" x="0" y="0"/><node id="2" x="9" y="0"/>'
                b'<way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="motorway"/>'
                b'<tag k="lanes" v="4"/><tag k="id" v="sneaky"/></way></osm>'
            )
        )
        segments = extract_motorways(net)
        back = segments_from_geojson(json.loads(json.dumps(segments_to_geojson(segments))))
        assert back[0].tags == segments[0].tags
