"""Pipeline CLI: composable stages over a shared JSON config.

Stages couple through files in the workdir only, so any stage can be
rerun in isolation and external classifiers plug in without linking.
Exit codes: 1 usage, 2 input/validation, 3 network, 4 classifier backend.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import augment as aug
from . import catalog as cat
from . import classify as clf
from . import corridors as cor
from . import covariates as cov
from . import density as den
from . import osm
from . import rasters as ras
from . import synth
from . import tiling as til
from .config import PipelineConfig, load_config
from .errors import ClassifierBackendError, NetworkError, PipelineError

logger = logging.getLogger("rhcd")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NETWORK = 3
EXIT_BACKEND = 4

RUN_ALL_STAGES = ("extract-network", "buffer", "fetch", "tile", "classify", "rhcd", "correlate")


class _NdjsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        return json.dumps(
            {
                "ts": datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
                "level": record.levelname,
                "logger": record.name,
                "msg": record.getMessage(),
            },
            sort_keys=True,
        )


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_NdjsonFormatter())
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract wants 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parallel_map(fn, items, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _chunks(items: list, n: int) -> list[list]:
    if n <= 1:
        return [items]
    size = max(1, (len(items) + n - 1) // n)
    return [items[i : i + size] for i in range(0, len(items), size)]


def _write_manifest(
    cfg: PipelineConfig, stage: str, inputs: list[str], outputs: list[str], t0: float
) -> None:
    mdir = Path(cfg.workdir) / "manifests"
    mdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "stage": stage,
        "inputs": sorted(str(p) for p in inputs),
        "outputs": sorted(str(p) for p in outputs),
        "config_hash": cfg.config_hash(),
        "duration_s": time.monotonic() - t0,
        "finished_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    (mdir / f"{stage}.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2), encoding="utf-8"
    )


def _require(value, name: str):
    if value is None:
        raise PipelineError(f"missing required setting {name!r} (config key or flag)")
    return value


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def stage_extract_network(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    osm_path = _require(cfg.osm_path, "osm_path")
    net = osm.parse_osm_xml(osm_path)
    segments = osm.extract_motorways(net)
    occluders = osm.extract_rail_occluders(net)
    inputs = [osm_path]
    if cfg.lanes_path:
        doc = json.loads(Path(cfg.lanes_path).read_text(encoding="utf-8"))
        segments = osm.match_lanes(segments, osm.lane_source_from_geojson(doc))
        inputs.append(cfg.lanes_path)
    workdir = Path(cfg.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    net_path = workdir / "network.geojson"
    occ_path = workdir / "occluders.geojson"
    osm.write_segments_geojson(segments, net_path)
    osm.write_segments_geojson(occluders, occ_path)
    logger.info(
        "extracted %d motorway segments, %d rail occluders", len(segments), len(occluders)
    )
    return inputs, [str(net_path), str(occ_path)]


def stage_buffer(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    workdir = Path(cfg.workdir)
    net_path = workdir / "network.geojson"
    occ_path = workdir / "occluders.geojson"
    segments = osm.read_segments_geojson(net_path)
    occluders = osm.read_segments_geojson(occ_path)
    road_polys = [
        cor.buffer_polyline(
            seg.geometry,
            cor.corridor_radius(seg.lanes, cfg.lane_width_m) + cfg.buffer_extra_m,
            unit_id=seg.id,
        )
        for seg in segments
    ]
    rail_polys = [
        cor.buffer_polyline(seg.geometry, cfg.rail_buffer_m, unit_id=seg.id)
        for seg in occluders
    ]
    corr_path = workdir / "corridors.geojson"
    rail_path = workdir / "rail_corridors.geojson"
    cor.write_corridors_geojson(road_polys, corr_path)
    cor.write_corridors_geojson(rail_polys, rail_path)
    return [str(net_path), str(occ_path)], [str(corr_path), str(rail_path)]


def stage_fetch(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    endpoint = _require(cfg.catalog_endpoint, "catalog_endpoint")
    bbox = tuple(_require(cfg.bbox, "bbox"))
    time_range = tuple(_require(cfg.time_range, "time_range"))
    items = cat.search_catalog(endpoint, bbox, time_range, backoff_s=cfg.retry_backoff_s)
    if not items:
        raise PipelineError("catalog search returned no items for the query window")
    items = cat.select_latest(items)
    assets_dir = Path(cfg.workdir) / "assets"
    assets_dir.mkdir(parents=True, exist_ok=True)

    def fetch_one(item: cat.CatalogItem) -> dict:
        path = cat.fetch_asset(item, assets_dir, backoff_s=cfg.retry_backoff_s)
        return {
            "item_id": item.item_id,
            "path": str(path),
            "bbox": list(item.bbox),
            "datetime": item.datetime.isoformat(),
        }

    fetched = _parallel_map(fetch_one, items, cfg.parallelism)
    fetched.sort(key=lambda rec: rec["item_id"])
    items_path = Path(cfg.workdir) / "items.json"
    items_path.write_text(json.dumps(fetched, sort_keys=True, indent=2), encoding="utf-8")
    logger.info("fetched %d imagery items", len(fetched))
    outputs = [rec["path"] for rec in fetched] + [str(items_path)]
    return [endpoint], outputs


def stage_tile(cfg: PipelineConfig, write_masks: bool = False) -> tuple[list[str], list[str]]:
    workdir = Path(cfg.workdir)
    items_path = workdir / "items.json"
    corr_path = workdir / "corridors.geojson"
    rail_path = workdir / "rail_corridors.geojson"
    items = json.loads(items_path.read_text(encoding="utf-8"))
    corridors = cor.read_corridors_geojson(corr_path)
    rails = cor.read_corridors_geojson(rail_path)
    if not corridors:
        raise PipelineError("no road corridors; run extract-network and buffer first")

    out_dir = workdir / "patches"
    out_dir.mkdir(parents=True, exist_ok=True)

    def tile_one(item: dict) -> tuple[str, float, list[til.Patch], int]:
        raster = ras.read_raster(item["path"])
        tile_id = Path(item["path"]).stem
        road_mask = cor.rasterize(corridors, raster.grid)
        if rails:
            road_mask = cor.subtract_occluders(road_mask, cor.rasterize(rails, raster.grid))
        masked = til.mask_raster(raster, road_mask)
        patches = til.tile_patches(
            masked, road_mask, corridors, cfg.min_road_fraction, tile_id, cfg.patch_px
        )
        if write_masks:
            cor.write_mask_pgm(road_mask, out_dir / f"{tile_id}_mask.pgm")
        windows = (raster.height // cfg.patch_px) * (raster.width // cfg.patch_px)
        return tile_id, raster.pixel_size, patches, windows

    results = _parallel_map(tile_one, items, cfg.parallelism)
    results.sort(key=lambda r: r[0])
    all_patches: list[til.Patch] = []
    pixel_sizes: dict[str, float] = {}
    total_windows = 0
    for tile_id, ps, patches, windows in results:
        pixel_sizes[tile_id] = ps
        all_patches.extend(patches)
        total_windows += windows
    index_path = til.write_patch_index(all_patches, out_dir, pixel_sizes)
    summary = {
        "tiles_processed": len(results),
        "patches_emitted": len(all_patches),
        "patches_skipped": total_windows - len(all_patches),
    }
    summary_path = workdir / "tile_summary.json"
    summary_path.write_text(json.dumps(summary, sort_keys=True, indent=2), encoding="utf-8")
    logger.info("tiling summary: %s", summary)
    inputs = [str(items_path), str(corr_path), str(rail_path)]
    return inputs, [str(index_path), str(summary_path)]


def _make_backend(cfg: PipelineConfig):
    if "exec" in cfg.classifier:
        return clf.ExternalBackend(cfg.classifier["exec"], cfg.external_timeout_s)
    params = cfg.classifier.get("builtin") or {}
    return clf.HeuristicBackend(clf.HeuristicParams(**params))


def stage_classify(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    workdir = Path(cfg.workdir)
    patches_dir = workdir / "patches"
    index_path = patches_dir / "patch_index.ndjson"
    records = til.read_patch_index(index_path)
    patches = [til.load_patch(rec, patches_dir) for rec in records]
    backend = _make_backend(cfg)
    chunks = _chunks(patches, cfg.parallelism)
    results = _parallel_map(backend.classify, chunks, cfg.parallelism)
    classifications = [c for chunk in results for c in chunk]
    classifications.sort(key=lambda c: c.patch_id)
    out_path = workdir / "classifications.ndjson"
    clf.write_classifications(classifications, out_path)
    n_crack = sum(1 for c in classifications if c.label == clf.LABEL_CRACK)
    logger.info(
        "classified %d patches with %s: %d crack", len(classifications), backend.name, n_crack
    )
    return [str(index_path)], [str(out_path)]


def stage_rhcd(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    workdir = Path(cfg.workdir)
    cls_path = workdir / "classifications.ndjson"
    index_path = workdir / "patches" / "patch_index.ndjson"
    net_path = workdir / "network.geojson"
    classifications = clf.read_classifications(cls_path)
    index = til.read_patch_index(index_path)
    segments = osm.read_segments_geojson(net_path)
    lengths = {seg.id: seg.length_m for seg in segments}
    records = den.aggregate_rhcd(classifications, index, lengths)
    if records:
        records = den.flag_top_percentile(records, cfg.top_percentile, cfg.weight_by_length)
    geo_path = workdir / "rhcd.geojson"
    csv_path = workdir / "rhcd.csv"
    den.write_records_geojson(records, segments, geo_path)
    den.write_records_csv(records, csv_path)
    logger.info("aggregated RHCD for %d units", len(records))
    return [str(cls_path), str(index_path), str(net_path)], [str(geo_path), str(csv_path)]


def _load_stack(cfg: PipelineConfig) -> cov.TemperatureStack:
    lst_dir = Path(_require(cfg.lst_dir, "lst_dir"))
    layer_paths = sorted(lst_dir.glob("*.f32"))
    if not layer_paths:
        raise PipelineError(f"no .f32 layers found in {lst_dir}")
    layers = [ras.read_raster(p) for p in layer_paths]
    return cov.TemperatureStack(layers=layers, timestamps=[p.stem for p in layer_paths])


def stage_lst_amplitude(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    stack = _load_stack(cfg)
    amplitude = cov.lt_lst_a(stack, cfg.lst_min_valid)
    workdir = Path(cfg.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    out_path = workdir / "lst_amplitude.f32"
    ras.write_raster(amplitude, out_path)
    return [str(cfg.lst_dir)], [str(out_path)]


def stage_correlate(cfg: PipelineConfig) -> tuple[list[str], list[str]]:
    workdir = Path(cfg.workdir)
    csv_path = workdir / "rhcd.csv"
    corr_path = workdir / "corridors.geojson"
    net_path = workdir / "network.geojson"
    records = den.read_records_csv(csv_path)
    rhcd_by_unit = {rec.unit_id: rec.rhcd_percent for rec in records}
    corridors = cor.read_corridors_geojson(corr_path)
    segments = osm.read_segments_geojson(net_path)
    inputs = [str(csv_path), str(corr_path), str(net_path)]
    outputs: list[str] = []

    covariate_rows: dict[str, list[cov.CovariateRow]] = {}
    if cfg.lst_dir:
        amp_path = workdir / "lst_amplitude.f32"
        if not amp_path.exists():
            stage_lst_amplitude(cfg)
        amplitude = ras.read_raster(amp_path)
        covariate_rows[cov.COVARIATE_LT_LST_A] = cov.sample_raster_per_unit(
            amplitude, corridors
        )
        inputs.append(str(amp_path))
    if cfg.tv_path:
        tv_features = cov.read_tv_geojson(cfg.tv_path)
        covariate_rows[cov.COVARIATE_TRAFFIC] = cov.join_traffic_volume(
            segments, tv_features
        )
        inputs.append(str(cfg.tv_path))
    if not covariate_rows:
        raise PipelineError("correlate needs lst_dir and/or tv_path configured")

    for kind in sorted(covariate_rows):
        rows = covariate_rows[kind]
        joined = [
            (row.unit_id, rhcd_by_unit[row.unit_id], row.value)
            for row in rows
            if row.unit_id in rhcd_by_unit
        ]
        joined.sort(key=lambda t: t[0])
        if len(joined) < 2:
            raise PipelineError(
                f"covariate {kind}: only {len(joined)} unit(s) joined with RHCD"
            )
        unit_ids = [t[0] for t in joined]
        xs = [t[1] for t in joined]
        ys = [t[2] for t in joined]
        report = cov.pearson(xs, ys, covariate_kind=kind)
        report_path = workdir / f"correlation_{kind}.json"
        report_path.write_text(
            json.dumps(report.to_dict(), sort_keys=True), encoding="utf-8"
        )
        outputs.append(str(report_path))
        scatter_path = workdir / f"scatter_{kind}.csv"
        cov.write_scatter_csv(
            scatter_path, unit_ids, cov.min_max_normalize(xs), cov.min_max_normalize(ys)
        )
        outputs.append(str(scatter_path))
        logger.info("correlation %s: r=%.4f over n=%d units", kind, report.r, report.n)
    return inputs, outputs


def stage_augment(cfg: PipelineConfig, index: str, labels: str, out: str) -> tuple[list[str], list[str]]:
    records = til.read_patch_index(index)
    label_of = clf.read_labels(labels)
    index_dir = Path(index).parent
    positives = [
        til.load_patch(rec, index_dir)
        for rec in records
        if label_of.get(rec.patch_id) == clf.LABEL_CRACK
    ]
    expanded = aug.expand_positive_set(positives)
    # patch images keep their source ground resolution
    sizes: dict[str, float] = {}
    for rec in records:
        tile = rec.patch_id.rsplit(":", 2)[0]
        if tile not in sizes:
            raster = ras.read_raster(index_dir / rec.file)
            sizes[tile] = raster.pixel_size
    out_index = til.write_patch_index(expanded, out, sizes if sizes else 0.1)
    logger.info("expanded %d positives to %d patches", len(positives), len(expanded))
    return [index, labels], [str(out_index)]


def stage_split(labels: str, seed: int, out: str) -> tuple[list[str], list[str]]:
    label_of = clf.read_labels(labels)
    ids_by_class: dict[str, list[str]] = {}
    for pid, label in label_of.items():
        ids_by_class.setdefault(label, []).append(pid)
    manifest = aug.split_dataset(ids_by_class, seed)
    aug.write_split(manifest, out)
    return [labels], [out]


def stage_evaluate(pred: str, truth: str, out: str) -> tuple[list[str], list[str]]:
    predictions = clf.read_classifications(pred)
    truth_map = clf.read_labels(truth)
    report = clf.evaluate(predictions, truth_map)
    Path(out).write_text(json.dumps(report.to_dict(), sort_keys=True), encoding="utf-8")
    for name, metrics in report.per_class.items():
        logger.info(
            "%s: precision=%.4f recall=%.4f f1=%.4f",
            name,
            metrics.precision,
            metrics.recall,
            metrics.f1,
        )
    return [pred, truth], [out]


def stage_synth(spec_path: str | None, demo: bool, out: str) -> tuple[list[str], list[str]]:
    if demo:
        spec = synth.demo_scene_spec()
        inputs = []
    else:
        if spec_path is None:
            raise PipelineError("synth needs --spec FILE or --demo")
        spec = synth.SceneSpec.from_json(Path(spec_path).read_text(encoding="utf-8"))
        inputs = [spec_path]
    scene = synth.generate_scene(spec)
    config_path = synth.save_scene(scene, out)
    logger.info("scene written to %s; pipeline config at %s", out, config_path)
    print(str(config_path))
    return inputs, [str(config_path)]


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="rhcd", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="STAGE")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config JSON")
    common.add_argument("--workdir", help="stage input/output directory")
    common.add_argument("--parallelism", type=int, help="worker count")

    p = sub.add_parser("extract-network", parents=[common], help="parse OSM XML into segments")
    p.add_argument("--osm", dest="osm_path", help="OSM XML extract path")
    p.add_argument("--lanes", dest="lanes_path", help="lane source GeoJSON")
    p.add_argument(
        "--projected",
        action="store_true",
        default=None,
        help="assert node coordinates are metric x/y",
    )

    p = sub.add_parser("buffer", parents=[common], help="build corridor polygons")
    p.add_argument("--lane-width-m", dest="lane_width_m", type=float)
    p.add_argument("--buffer-extra", dest="buffer_extra_m", type=float)
    p.add_argument("--rail-buffer", dest="rail_buffer_m", type=float)

    p = sub.add_parser("fetch", parents=[common], help="search catalog and fetch imagery")
    p.add_argument("--endpoint", dest="catalog_endpoint")
    p.add_argument("--bbox", dest="bbox", type=float, nargs=4, metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    p.add_argument("--time-range", dest="time_range", nargs=2, metavar=("START", "END"))

    p = sub.add_parser("tile", parents=[common], help="mask imagery and cut patches")
    p.add_argument("--min-road-fraction", dest="min_road_fraction", type=float)
    p.add_argument("--patch-px", dest="patch_px", type=int)
    p.add_argument("--write-masks", action="store_true", help="export PGM road masks")

    p = sub.add_parser("augment", parents=[common], help="expand crack-labeled patches 7x")
    p.add_argument("--index", required=True, help="patch index NDJSON")
    p.add_argument("--labels", required=True, help="labels NDJSON {patch_id,label}")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("split", parents=[common], help="stratified 80/10/10 split")
    p.add_argument("--labels", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("classify", parents=[common], help="label patches crack/no-crack")
    p.add_argument("--classifier-exec", dest="classifier_exec", help="external model command")
    p.add_argument("--timeout", dest="external_timeout_s", type=float)

    p = sub.add_parser("evaluate", parents=[common], help="precision/recall/F1 vs truth")
    p.add_argument("--pred", required=True, help="classifications NDJSON")
    p.add_argument("--truth", required=True, help="truth labels NDJSON")
    p.add_argument("--out", required=True, help="metrics JSON output")

    p = sub.add_parser("rhcd", parents=[common], help="aggregate the crack-density index")
    p.add_argument("--top-percentile", dest="top_percentile", type=float)
    p.add_argument(
        "--weight-by-length",
        dest="weight_by_length",
        action="store_true",
        default=None,
        help="percentile over the length-weighted distribution",
    )

    p = sub.add_parser("lst-amplitude", parents=[common], help="per-cell max-min temperature")
    p.add_argument("--lst-dir", dest="lst_dir")
    p.add_argument("--min-valid", dest="lst_min_valid", type=int)

    p = sub.add_parser("correlate", parents=[common], help="Pearson r of RHCD vs covariates")
    p.add_argument("--tv", dest="tv_path", help="traffic volume GeoJSON")
    p.add_argument("--lst-dir", dest="lst_dir")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic scene")
    p.add_argument("--spec", help="scene spec JSON")
    p.add_argument("--demo", action="store_true", help="built-in 4-segment demo scene")
    p.add_argument("--out", required=True, help="scene output directory")

    p = sub.add_parser("run-all", parents=[common], help="extract through correlate")
    p.add_argument("--classifier-exec", dest="classifier_exec")

    return parser


_CONFIG_KEYS = (
    "workdir",
    "parallelism",
    "osm_path",
    "lanes_path",
    "projected",
    "lane_width_m",
    "buffer_extra_m",
    "rail_buffer_m",
    "catalog_endpoint",
    "bbox",
    "time_range",
    "min_road_fraction",
    "patch_px",
    "external_timeout_s",
    "top_percentile",
    "weight_by_length",
    "lst_dir",
    "lst_min_valid",
    "tv_path",
)


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    if getattr(args, "bbox", None) is not None:
        overrides["bbox"] = list(args.bbox)
    if getattr(args, "time_range", None) is not None:
        overrides["time_range"] = list(args.time_range)
    if getattr(args, "classifier_exec", None):
        overrides["classifier"] = {"exec": args.classifier_exec}
    return load_config(args.config, overrides)


def _run_stage(cfg: PipelineConfig, stage: str, args: argparse.Namespace) -> None:
    t0 = time.monotonic()
    if stage == "extract-network":
        inputs, outputs = stage_extract_network(cfg)
    elif stage == "buffer":
        inputs, outputs = stage_buffer(cfg)
    elif stage == "fetch":
        inputs, outputs = stage_fetch(cfg)
    elif stage == "tile":
        inputs, outputs = stage_tile(cfg, getattr(args, "write_masks", False))
    elif stage == "classify":
        inputs, outputs = stage_classify(cfg)
    elif stage == "rhcd":
        inputs, outputs = stage_rhcd(cfg)
    elif stage == "lst-amplitude":
        inputs, outputs = stage_lst_amplitude(cfg)
    elif stage == "correlate":
        inputs, outputs = stage_correlate(cfg)
    elif stage == "augment":
        inputs, outputs = stage_augment(cfg, args.index, args.labels, args.out)
    elif stage == "split":
        inputs, outputs = stage_split(args.labels, args.seed, args.out)
    elif stage == "evaluate":
        inputs, outputs = stage_evaluate(args.pred, args.truth, args.out)
    elif stage == "synth":
        inputs, outputs = stage_synth(args.spec, args.demo, args.out)
    else:  # pragma: no cover - parser restricts choices
        raise PipelineError(f"unknown stage {stage}")
    _write_manifest(cfg, stage, inputs, outputs, t0)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args.verbose)

    if args.config is not None and not Path(args.config).exists():
        parser.print_usage(sys.stderr)
        print(f"rhcd: error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_USAGE

    try:
        cfg = _config_from_args(args)
        if args.command == "run-all":
            for stage in RUN_ALL_STAGES:
                logger.info("run-all: starting stage %s", stage)
                _run_stage(cfg, stage, args)
        else:
            _run_stage(cfg, args.command, args)
    except NetworkError as exc:
        logger.error("network error: %s", exc)
        return EXIT_NETWORK
    except ClassifierBackendError as exc:
        logger.error("classifier backend error: %s", exc)
        return EXIT_BACKEND
    except (PipelineError, FileNotFoundError) as exc:
        logger.error("input error: %s", exc)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
