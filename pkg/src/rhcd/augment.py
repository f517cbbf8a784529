"""Deterministic patch augmentation and dataset split bookkeeping.

Six variants per patch, in fixed order: rot90 (counter-clockwise),
rot270, horizontal flip, vertical flip, brightness +40, brightness -40.
Geometric ops are exact pixel permutations; brightness is an additive
per-channel shift clamped to [0, 255].
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .tiling import Patch

BRIGHTNESS_STEP = 40

VARIANT_SUFFIXES = (":r90", ":r270", ":fh", ":fv", ":b+40", ":b-40")

DEFAULT_FRACTIONS = (0.8, 0.1, 0.1)


def _brightness(pixels: np.ndarray, delta: int) -> np.ndarray:
    shifted = pixels.astype(np.int16) + delta
    return np.clip(shifted, 0, 255).astype(np.uint8)


def augment_patch(patch: Patch) -> list[Patch]:
    """The six augmentation variants of a patch, fixed order."""
    px = patch.pixels
    if px.ndim != 3 or px.shape[0] != px.shape[1]:
        raise ValidationError("augmentation expects a square RGB patch")
    variants = [
        np.rot90(px, 1),
        np.rot90(px, 3),
        np.fliplr(px),
        np.flipud(px),
        _brightness(px, BRIGHTNESS_STEP),
        _brightness(px, -BRIGHTNESS_STEP),
    ]
    return [
        replace(patch, patch_id=patch.patch_id + suffix, pixels=np.ascontiguousarray(v))
        for suffix, v in zip(VARIANT_SUFFIXES, variants)
    ]


def expand_positive_set(positives: list[Patch]) -> list[Patch]:
    """Originals plus their six variants each: exactly 7 * len(positives)."""
    out: list[Patch] = []
    for p in positives:
        out.append(p)
        out.extend(augment_patch(p))
    return out


@dataclass
class SplitManifest:
    train: list[str]
    validation: list[str]
    test: list[str]
    fractions: tuple[float, float, float]
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "train": self.train,
                "validation": self.validation,
                "test": self.test,
                "fractions": list(self.fractions),
                "seed": self.seed,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SplitManifest":
        doc = json.loads(text)
        return cls(
            train=list(doc["train"]),
            validation=list(doc["validation"]),
            test=list(doc["test"]),
            fractions=tuple(doc["fractions"]),
            seed=int(doc["seed"]),
        )


def split_dataset(
    ids_by_class: dict[str, list[str]],
    seed: int,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
) -> SplitManifest:
    """Stratified train/validation/test split.

    Per class: ids are sorted, shuffled with the seed, then cut with floor
    rounding on train and validation; the remainder goes to test. Sorting
    before the shuffle makes the manifest a function of (id set, seed)
    rather than of input order.
    """
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"split fractions {fractions} do not sum to 1")
    for cls_name, ids in ids_by_class.items():
        if not ids:
            raise ValidationError(f"class {cls_name!r} has no samples")

    train: list[str] = []
    validation: list[str] = []
    test: list[str] = []
    rng = random.Random(seed)
    for cls_name in sorted(ids_by_class):
        ids = sorted(ids_by_class[cls_name])
        rng.shuffle(ids)
        n = len(ids)
        # floor of the exact target; tiny epsilon guards against float
        # products landing one ulp below an integer
        n_train = int(n * fractions[0] + 1e-9)
        n_val = int(n * fractions[1] + 1e-9)
        train.extend(ids[:n_train])
        validation.extend(ids[n_train : n_train + n_val])
        test.extend(ids[n_train + n_val :])
    return SplitManifest(
        train=train, validation=validation, test=test, fractions=fractions, seed=seed
    )


def write_split(manifest: SplitManifest, path: str | Path) -> None:
    Path(path).write_text(manifest.to_json(), encoding="utf-8")


def read_split(path: str | Path) -> SplitManifest:
    return SplitManifest.from_json(Path(path).read_text(encoding="utf-8"))
