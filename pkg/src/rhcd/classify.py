"""Crack/no-crack patch classification and evaluation metrics.

Two backends share one interface:

  * builtin heuristic: a deterministic dark-elongated-component detector.
    It exists to let the whole pipeline run and be verified without a
    trained model; it is a stand-in, not a reimplementation of one.
  * external subprocess: any runtime can plug in a real model by speaking
    newline-delimited JSON over stdin/stdout (one request line per patch
    {patch_id, width, height, rgb_base64}; one response line per request
    {patch_id, label, confidence}; order does not matter).
"""

from __future__ import annotations

import base64
import json
import shlex
import subprocess
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ClassifierBackendError, ValidationError
from .tiling import Patch

LABEL_CRACK = "crack"
LABEL_NO_CRACK = "no_crack"
LABELS = (LABEL_CRACK, LABEL_NO_CRACK)

EXTERNAL_TIMEOUT_S = 60.0


@dataclass(frozen=True)
class Classification:
    patch_id: str
    label: str
    confidence: float

    def __post_init__(self) -> None:
        if self.label not in LABELS:
            raise ValidationError(f"label must be one of {LABELS}, got {self.label!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0,1]")


@dataclass(frozen=True)
class HeuristicParams:
    """Dark-pixel detector thresholds; tuned for the synthetic scenes and
    exposed in the pipeline config."""

    dark_sigma: float = 1.5  # darker than mean - k*std counts as dark
    min_component_px: int = 10
    min_elongation: float = 3.0


def heuristic_classify(
    patch: Patch, params: HeuristicParams = HeuristicParams()
) -> Classification:
    """Label a patch crack iff its road pixels contain a sufficiently
    large, elongated 8-connected dark component.

    Road pixels are the non-black ones (masking paints non-road black).
    Confidence is min(1, component_size/100) for cracks, 1 - dark
    fraction otherwise.
    """
    px = patch.pixels
    road = np.any(px != 0, axis=2)
    n_road = int(road.sum())
    if n_road == 0:
        return Classification(patch.patch_id, LABEL_NO_CRACK, 1.0)

    gray = px.astype(np.float64).sum(axis=2) / 3.0
    road_vals = gray[road]
    mean = float(road_vals.mean())
    std = float(road_vals.std())
    dark = road & (gray < mean - params.dark_sigma * std)
    n_dark = int(dark.sum())
    if n_dark == 0:
        return Classification(patch.patch_id, LABEL_NO_CRACK, 1.0)

    labels, _n = ndimage.label(dark, structure=np.ones((3, 3), dtype=int))
    sizes = np.bincount(labels.ravel())
    best_size = 0
    for comp_id, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        size = int(sizes[comp_id])
        if size < params.min_component_px:
            continue
        h = sl[0].stop - sl[0].start
        w = sl[1].stop - sl[1].start
        if max(h, w) / min(h, w) >= params.min_elongation:
            best_size = max(best_size, size)

    if best_size > 0:
        return Classification(patch.patch_id, LABEL_CRACK, min(1.0, best_size / 100.0))
    return Classification(patch.patch_id, LABEL_NO_CRACK, 1.0 - n_dark / n_road)


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


class HeuristicBackend:
    """Builtin deterministic classifier."""

    name = "builtin"

    def __init__(self, params: HeuristicParams = HeuristicParams()):
        self.params = params

    def classify(self, patches: list[Patch]) -> list[Classification]:
        return [heuristic_classify(p, self.params) for p in patches]


class ExternalBackend:
    """Adapter for an external model process speaking NDJSON."""

    def __init__(self, command: str, timeout_s: float = EXTERNAL_TIMEOUT_S):
        self.command = command
        self.timeout_s = timeout_s
        self.name = f"exec:{command}"

    def classify(self, patches: list[Patch]) -> list[Classification]:
        return external_classify(patches, self.command, self.timeout_s)


def _encode_request(patch: Patch) -> str:
    h, w = patch.pixels.shape[:2]
    rgb = base64.b64encode(np.ascontiguousarray(patch.pixels).tobytes()).decode("ascii")
    return json.dumps(
        {"patch_id": patch.patch_id, "width": w, "height": h, "rgb_base64": rgb}
    )


def external_classify(
    patches: list[Patch], command: str, timeout_s: float = EXTERNAL_TIMEOUT_S
) -> list[Classification]:
    """Run an external classifier process over a batch of patches.

    Responses are matched by patch_id, so the child may answer in any
    order. Nonzero exit, malformed lines, unknown/missing patch ids and
    timeouts all raise ClassifierBackendError.
    """
    if not patches:
        return []
    request_blob = "".join(_encode_request(p) + "\n" for p in patches)
    try:
        proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=None,  # diagnostics pass through
            text=True,
        )
    except OSError as exc:
        raise ClassifierBackendError(f"cannot launch classifier {command!r}: {exc}") from exc
    try:
        stdout, _ = proc.communicate(request_blob, timeout=timeout_s)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.communicate()
        raise ClassifierBackendError(
            f"classifier timed out after {timeout_s}s; first pending patch "
            f"{patches[0].patch_id!r}"
        ) from None
    if proc.returncode != 0:
        raise ClassifierBackendError(
            f"classifier exited with status {proc.returncode}"
        )

    expected = {p.patch_id for p in patches}
    by_id: dict[str, Classification] = {}
    for line_no, line in enumerate(stdout.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            cls = Classification(
                patch_id=rec["patch_id"],
                label=rec["label"],
                confidence=float(rec["confidence"]),
            )
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise ClassifierBackendError(
                f"malformed classifier response on line {line_no}: {exc}"
            ) from exc
        if cls.patch_id not in expected:
            raise ClassifierBackendError(
                f"classifier answered for unknown patch_id {cls.patch_id!r}"
            )
        by_id[cls.patch_id] = cls
    missing = sorted(expected - set(by_id))
    if missing:
        raise ClassifierBackendError(
            f"classifier returned no response for patch_id(s) {missing}"
        )
    return [by_id[p.patch_id] for p in patches]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricsReport:
    per_class: dict[str, ClassMetrics]
    tp: int
    fp: int
    tn: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "per_class": {
                name: {"precision": m.precision, "recall": m.recall, "f1": m.f1}
                for name, m in self.per_class.items()
            },
            "counts": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
        }


def _prf(tp: int, fp: int, fn: int) -> ClassMetrics:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return ClassMetrics(precision=precision, recall=recall, f1=f1)


def evaluate(
    predictions: list[Classification], truth: dict[str, str]
) -> MetricsReport:
    """Binary metrics per class; crack is the positive class for counts."""
    missing = sorted(p.patch_id for p in predictions if p.patch_id not in truth)
    if missing:
        raise ValidationError(f"predictions without truth labels: {missing}")
    tp = fp = tn = fn = 0
    for p in predictions:
        actual = truth[p.patch_id]
        if actual not in LABELS:
            raise ValidationError(f"truth label {actual!r} for {p.patch_id}")
        if p.label == LABEL_CRACK:
            if actual == LABEL_CRACK:
                tp += 1
            else:
                fp += 1
        else:
            if actual == LABEL_CRACK:
                fn += 1
            else:
                tn += 1
    return MetricsReport(
        per_class={
            LABEL_CRACK: _prf(tp, fp, fn),
            LABEL_NO_CRACK: _prf(tn, fn, fp),
        },
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )


# ---------------------------------------------------------------------------
# NDJSON persistence
# ---------------------------------------------------------------------------


def write_classifications(records: list[Classification], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "patch_id": rec.patch_id,
                        "label": rec.label,
                        "confidence": rec.confidence,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_classifications(path) -> list[Classification]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(
                Classification(
                    patch_id=rec["patch_id"],
                    label=rec["label"],
                    confidence=float(rec["confidence"]),
                )
            )
    return out


def read_labels(path) -> dict[str, str]:
    """NDJSON {patch_id, label} -> mapping."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out[rec["patch_id"]] = rec["label"]
    return out
