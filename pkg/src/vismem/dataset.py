"""Datasets: manifest ingestion, deterministic splits, synthetic corpora.

Manifests are JSON-lines, one ``{"id", "path", "category"}`` object per
line, category ``"natural"`` or ``"texture"``. Real image corpora plug in
through manifests; the two synthetic generators below produce desk-scale
stand-ins so experiments run with no external data:

* ``synth_structured`` — low-frequency images (a random 4x4 color grid,
  bilinearly upsampled, plus a mild linear shading gradient). Distinct
  images have well-separated coarse cell means.
* ``synth_texture`` — per-pixel i.i.d. uniform noise. With the default
  full [0, 255] range each texture still carries a detectable identity
  in its cell means; passing ``amplitude`` narrows the range around
  mid-gray (per-image amplitude drawn from a ``(lo, hi)`` tuple), which
  drives cell-mean identity below the memory-noise floor and makes
  textures mutually indistinguishable to a coarse encoder — the
  behavioral analog of texture recall collapsing to chance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DuplicateIdError, FractionError, ParseError
from .image import ImageBuffer
from .rng import derive_seed, make_generator

CATEGORIES = ("natural", "texture")


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    path: str
    category: str


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Parse a JSON-lines manifest; duplicate ids are rejected."""
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line=lineno) from exc
            if not isinstance(obj, dict):
                raise ParseError("manifest line is not an object", line=lineno)
            missing = {"id", "path", "category"} - obj.keys()
            if missing:
                raise ParseError(f"missing fields {sorted(missing)}", line=lineno)
            if obj["category"] not in CATEGORIES:
                raise ParseError(f"unknown category {obj['category']!r}", line=lineno)
            rid = str(obj["id"])
            if rid in seen:
                raise DuplicateIdError(f"line {lineno}: duplicate id {rid!r}")
            seen.add(rid)
            entries.append(ManifestEntry(rid, str(obj["path"]), obj["category"]))
    return entries


def write_manifest(path: str | Path, entries) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            fh.write(json.dumps({"id": e.id, "path": e.path, "category": e.category}) + "\n")


def missing_paths(entries) -> list[str]:
    """Ids whose image files do not exist on disk."""
    return [e.id for e in entries if not Path(e.path).exists()]


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    """Fractions of the corpus for each role.

    ``memorize + novel + calibration_novel`` must not exceed 1; the
    remainder of the corpus is unused. ``calibration_seen`` is a fraction
    of the *memorize* subset (calibration-seen items must have been
    memorized, so they overlap it by design).
    """

    memorize: float = 0.5
    novel: float = 0.5
    calibration_novel: float = 0.0
    calibration_seen: float = 0.0
    seed: int = 0

    def __post_init__(self):
        fracs = (self.memorize, self.novel, self.calibration_novel, self.calibration_seen)
        if any(f < 0 for f in fracs):
            raise FractionError(f"fractions must be >= 0, got {fracs}")
        total = self.memorize + self.novel + self.calibration_novel
        if total > 1.0 + 1e-9:
            raise FractionError(f"memorize + novel + calibration_novel = {total} > 1")
        if self.calibration_seen > 1.0 + 1e-9:
            raise FractionError(f"calibration_seen = {self.calibration_seen} > 1")


@dataclass
class SplitResult:
    memorize: list
    novel: list
    calibration_seen: list
    calibration_novel: list


def split(entries, spec: SplitSpec) -> SplitResult:
    """Deterministic shuffle-and-partition.

    Subsets are pairwise disjoint except ``calibration_seen``, which is
    the head of the (already shuffled) memorize subset.
    """
    entries = list(entries)
    n = len(entries)
    rng = make_generator(derive_seed(spec.seed, "split"))
    order = rng.permutation(n)
    shuffled = [entries[i] for i in order]
    n_mem = round(spec.memorize * n)
    n_nov = round(spec.novel * n)
    n_cal_nov = round(spec.calibration_novel * n)
    if n_mem + n_nov + n_cal_nov > n:
        raise FractionError(
            f"rounded subset sizes {n_mem}+{n_nov}+{n_cal_nov} exceed corpus size {n}"
        )
    memorize = shuffled[:n_mem]
    novel = shuffled[n_mem : n_mem + n_nov]
    cal_novel = shuffled[n_mem + n_nov : n_mem + n_nov + n_cal_nov]
    n_cal_seen = round(spec.calibration_seen * n_mem)
    cal_seen = memorize[:n_cal_seen]
    return SplitResult(memorize, novel, cal_seen, cal_novel)


# ---------------------------------------------------------------------------
# synthetic corpora
# ---------------------------------------------------------------------------

def _bilinear_upsample(grid: np.ndarray, size: int) -> np.ndarray:
    # grid (g, g, c) -> (size, size, c), sampling at pixel centers
    g = grid.shape[0]
    t = np.clip((np.arange(size) + 0.5) * g / size - 0.5, 0.0, g - 1.0)
    i0 = np.minimum(t.astype(int), g - 2)
    frac = t - i0
    rows = grid[i0] * (1 - frac)[:, None, None] + grid[i0 + 1] * frac[:, None, None]
    out = (
        rows[:, i0] * (1 - frac)[None, :, None]
        + rows[:, i0 + 1] * frac[None, :, None]
    )
    return out


def synth_structured(n: int, size: int = 64, seed: int = 0, channels: int = 3,
                     prefix: str = "structured") -> list[tuple[str, ImageBuffer]]:
    """Low-frequency synthetic images with distinct coarse signatures."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if size < 8:
        raise ValueError("size must be >= 8")
    out = []
    for i in range(n):
        item_id = f"{prefix}-{i:05d}"
        rng = make_generator(derive_seed(seed, item_id))
        blocks = rng.integers(0, 256, size=(4, 4, channels)).astype(np.float64)
        img = _bilinear_upsample(blocks, size)
        # mild shading gradient, random direction, peak amplitude ~15
        gx, gy = rng.uniform(-15, 15, size=2)
        ramp = (
            gx * (np.arange(size) / max(size - 1, 1) - 0.5)[None, :]
            + gy * (np.arange(size) / max(size - 1, 1) - 0.5)[:, None]
        )
        img = img + ramp[:, :, None]
        out.append((item_id, ImageBuffer(np.clip(np.rint(img), 0, 255).astype(np.uint8))))
    return out


def synth_texture(n: int, size: int = 64, seed: int = 0, channels: int = 3,
                  amplitude: int | tuple[int, int] | None = None,
                  prefix: str = "texture") -> list[tuple[str, ImageBuffer]]:
    """Per-pixel i.i.d. uniform-noise images.

    ``amplitude=None`` draws each pixel uniformly over the full [0, 255]
    range. An int ``a`` restricts pixels to [128 - a, 128 + a]; a tuple
    ``(lo, hi)`` additionally draws the amplitude per image, giving the
    population a little heterogeneity.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for i in range(n):
        item_id = f"{prefix}-{i:05d}"
        rng = make_generator(derive_seed(seed, item_id))
        if amplitude is None:
            px = rng.integers(0, 256, size=(size, size, channels))
        else:
            if isinstance(amplitude, tuple):
                lo, hi = amplitude
                a = int(rng.integers(lo, hi + 1))
            else:
                a = int(amplitude)
            if not 1 <= a <= 127:
                raise ValueError(f"amplitude must be in [1, 127], got {a}")
            px = rng.integers(128 - a, 128 + a + 1, size=(size, size, channels))
        out.append((item_id, ImageBuffer(px.astype(np.uint8))))
    return out
