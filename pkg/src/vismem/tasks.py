"""The two recognition-memory protocols and their shared machinery.

Memorization perturbs each image once (per-item derived seed), encodes
it, and stores the embedding. Recall always encodes the probe image
*clean* — the recall path deliberately takes no perturbation parameters —
and asks the store for the nearest-neighbor distance ``d_nn``.

* Forced choice: for a (seen, novel) pair, the image with the smaller
  ``d_nn`` is called seen. Exact ties count as incorrect and are flagged.
* Repeat detection: images stream in one at a time; an alarm fires when
  ``d_nn < delta`` (strictly), then the incoming image is perturbed and
  memorized. ``delta`` is the midpoint of mean seen / mean novel ``d_nn``
  on a calibration set, computed by :func:`calibrate_threshold`.

Repeat streams are sampled by :func:`make_repeat_stream`: after the first
item each position is a repeat with probability ``repeat_rate``, choosing
uniformly among earlier items not yet repeated (each id repeats at most
once); otherwise the next fresh id is emitted. An item's lag is the
number of intervening items since its first exposure (0 = 1-back).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .encoders import Encoder
from .errors import (
    EmptyCalibrationSetError,
    EmptyPairsError,
    ExhaustedImagesError,
)
from .image import ImageBuffer
from .memory import MemoryStore, NearestNeighborResult
from .perturbation import PerturbationSpec, perturb
from .rng import derive_seed, make_generator

Item = tuple[str, ImageBuffer]

LAG_BUCKETS = (
    ("0", 0, 0),
    ("1-10", 1, 10),
    ("11-100", 11, 100),
    ("101-1000", 101, 1000),
    (">1000", 1001, None),
)


def lag_bucket(lag: int) -> str:
    for label, lo, hi in LAG_BUCKETS:
        if lag >= lo and (hi is None or lag <= hi):
            return label
    raise ValueError(f"negative lag {lag}")


# ---------------------------------------------------------------------------
# memorize / recall
# ---------------------------------------------------------------------------

def memorize(items: Sequence[Item], encoder: Encoder, spec: PerturbationSpec,
             metric: str = "l2", normalize: bool = False) -> MemoryStore:
    """Perturb (one draw per item), encode, and store every image."""
    records = []
    for item_id, img in items:
        noisy = perturb(img, spec.for_item(item_id))
        records.append((item_id, encoder.encode_item(item_id, noisy)))
    return MemoryStore.build(records, dim=encoder.dim, metric=metric, normalize=normalize)


def recall_distance(store: MemoryStore, img: ImageBuffer, encoder: Encoder,
                    item_id: str = "") -> NearestNeighborResult:
    """Encode the probe clean (never perturbed) and query the store."""
    return store.nearest(encoder.encode_item(item_id, img))


# ---------------------------------------------------------------------------
# forced choice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ForcedChoiceTrial:
    index: int
    seen_id: str
    novel_id: str
    d_seen: float
    d_novel: float
    seen_nn_id: str
    novel_nn_id: str
    correct: bool
    tie: bool


@dataclass
class ForcedChoiceResult:
    accuracy: float
    trials: list[ForcedChoiceTrial]

    @property
    def n_correct(self) -> int:
        return sum(t.correct for t in self.trials)


def forced_choice(store: MemoryStore, pairs: Sequence[tuple[Item, Item]],
                  encoder: Encoder) -> ForcedChoiceResult:
    """Run one trial per (seen item, novel item) pair.

    The smaller recall distance wins; an exact float tie is scored
    incorrect with ``tie=True``. Presentation order inside the pair does
    not affect the outcome.
    """
    if not pairs:
        raise EmptyPairsError("forced_choice needs at least one pair")
    trials = []
    for i, ((seen_id, seen_img), (novel_id, novel_img)) in enumerate(pairs):
        r_seen = recall_distance(store, seen_img, encoder, seen_id)
        r_novel = recall_distance(store, novel_img, encoder, novel_id)
        tie = r_seen.distance == r_novel.distance
        trials.append(ForcedChoiceTrial(
            index=i,
            seen_id=seen_id,
            novel_id=novel_id,
            d_seen=r_seen.distance,
            d_novel=r_novel.distance,
            seen_nn_id=r_seen.id,
            novel_nn_id=r_novel.id,
            correct=(not tie) and r_seen.distance < r_novel.distance,
            tie=tie,
        ))
    accuracy = sum(t.correct for t in trials) / len(trials)
    return ForcedChoiceResult(accuracy=accuracy, trials=trials)


# ---------------------------------------------------------------------------
# threshold calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdCalibration:
    mean_seen: float
    mean_novel: float
    delta: float
    degenerate: bool

    @classmethod
    def from_means(cls, mean_seen: float, mean_novel: float) -> "ThresholdCalibration":
        return cls(
            mean_seen=mean_seen,
            mean_novel=mean_novel,
            delta=(mean_seen + mean_novel) / 2.0,
            degenerate=mean_seen >= mean_novel,
        )


def calibrate_threshold(store: MemoryStore, seen_cal: Sequence[Item],
                        novel_cal: Sequence[Item], encoder: Encoder) -> ThresholdCalibration:
    """Midpoint threshold from average seen / novel recall distances.

    ``seen_cal`` items must already be memorized in ``store``; the result
    is flagged degenerate when the seen mean is not strictly below the
    novel mean.
    """
    if not seen_cal or not novel_cal:
        raise EmptyCalibrationSetError("calibration sets must be non-empty")
    missing = [item_id for item_id, _ in seen_cal if item_id not in store]
    if missing:
        raise ValueError(f"calibration-seen ids not memorized: {missing[:5]}")
    d_seen = [recall_distance(store, img, encoder, item_id).distance for item_id, img in seen_cal]
    d_novel = [recall_distance(store, img, encoder, item_id).distance for item_id, img in novel_cal]
    return ThresholdCalibration.from_means(
        mean_seen=sum(d_seen) / len(d_seen),
        mean_novel=sum(d_novel) / len(d_novel),
    )


# ---------------------------------------------------------------------------
# repeat detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StreamEvent:
    image_id: str
    is_repeat: bool
    lag: int | None  # intervening items since first exposure; None for fresh


@dataclass
class RepeatStream:
    events: list[StreamEvent]
    repeat_rate: float

    @property
    def n_repeats(self) -> int:
        return sum(e.is_repeat for e in self.events)


def make_repeat_stream(ids: Sequence[str], length: int | None = None,
                       repeat_rate: float = 0.125, seed: int = 0) -> RepeatStream:
    """Sample a presentation stream with ~``repeat_rate`` repeats.

    With ``length=None`` the stream runs until the fresh pool would be
    exhausted; an explicit length raises ``ExhaustedImagesError`` if the
    pool runs dry first. A position where a repeat was drawn but every
    earlier id has already been repeated falls back to a fresh id.
    """
    if not 0.0 <= repeat_rate < 1.0:
        raise ValueError(f"repeat_rate must be in [0, 1), got {repeat_rate}")
    ids = list(ids)
    rng = make_generator(derive_seed(seed, "repeat-stream"))
    events: list[StreamEvent] = []
    first_pos: dict[str, int] = {}
    repeatable: list[str] = []
    fresh = 0

    def emit_fresh() -> bool:
        nonlocal fresh
        if fresh >= len(ids):
            return False
        rid = ids[fresh]
        fresh += 1
        first_pos[rid] = len(events)
        repeatable.append(rid)
        events.append(StreamEvent(rid, False, None))
        return True

    target = length if length is not None else None
    while target is None or len(events) < target:
        want_repeat = events and repeatable and rng.random() < repeat_rate
        if want_repeat:
            k = int(rng.integers(len(repeatable)))
            rid = repeatable.pop(k)
            lag = len(events) - first_pos[rid] - 1
            events.append(StreamEvent(rid, True, lag))
        else:
            if not emit_fresh():
                if target is None:
                    break
                raise ExhaustedImagesError(
                    f"needed a fresh id at position {len(events)}, pool of {len(ids)} exhausted"
                )
    return RepeatStream(events=events, repeat_rate=repeat_rate)


@dataclass(frozen=True)
class AlarmRecord:
    position: int
    image_id: str
    is_repeat: bool
    lag: int | None
    d_nn: float | None  # None when memory was empty
    fired: bool


@dataclass
class LagBucketStats:
    repeats: int = 0
    hits: int = 0

    @property
    def hit_rate(self) -> float | None:
        return None if self.repeats == 0 else self.hits / self.repeats


@dataclass
class RepeatDetectionMetrics:
    hit_rate: float | None  # None when the stream had no repeats
    false_alarm_rate: float | None
    n_repeats: int
    n_non_repeats: int
    per_lag: dict[str, LagBucketStats]
    alarms: list[AlarmRecord] = field(default_factory=list)


def repeat_detection(stream: RepeatStream, images: Mapping[str, ImageBuffer],
                     encoder: Encoder, spec: PerturbationSpec, delta: float,
                     metric: str = "l2", normalize: bool = False,
                     memorize_encoder: Encoder | None = None) -> RepeatDetectionMetrics:
    """Run the streaming alarm task.

    Per event: encode the incoming image clean, query the memory of all
    prior events, fire iff ``d_nn < delta`` (an empty memory never
    fires), then perturb-and-memorize the incoming image under a unique
    per-event storage id. ``memorize_encoder`` lets the storage side use
    a different encoder than the probes (defaults to the same one).
    """
    memorize_encoder = memorize_encoder or encoder
    store = MemoryStore(encoder.dim, metric=metric, normalize=normalize)
    alarms: list[AlarmRecord] = []
    per_lag = {label: LagBucketStats() for label, _, _ in LAG_BUCKETS}
    hits = n_repeats = false_alarms = n_non_repeats = 0

    for pos, event in enumerate(stream.events):
        img = images[event.image_id]
        probe = encoder.encode_item(event.image_id, img)
        if store.is_empty:
            d_nn = None
            fired = False
        else:
            d_nn = store.nearest(probe).distance
            fired = d_nn < delta
        alarms.append(AlarmRecord(pos, event.image_id, event.is_repeat, event.lag, d_nn, fired))
        if event.is_repeat:
            n_repeats += 1
            hits += fired
            bucket = per_lag[lag_bucket(event.lag)]
            bucket.repeats += 1
            bucket.hits += fired
        else:
            n_non_repeats += 1
            false_alarms += fired
        storage_id = f"{pos:06d}/{event.image_id}"
        noisy = perturb(img, spec.for_item(storage_id))
        store.insert(storage_id, memorize_encoder.encode_item(event.image_id, noisy))

    return RepeatDetectionMetrics(
        hit_rate=None if n_repeats == 0 else hits / n_repeats,
        false_alarm_rate=None if n_non_repeats == 0 else false_alarms / n_non_repeats,
        n_repeats=n_repeats,
        n_non_repeats=n_non_repeats,
        per_lag=per_lag,
        alarms=alarms,
    )
