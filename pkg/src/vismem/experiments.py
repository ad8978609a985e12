"""End-to-end experiment runs wiring datasets, encoders, perturbation,
tasks and analysis into reproducible reports.

Each ``run_*`` function takes an :class:`~vismem.config.ExperimentConfig`,
writes its artifacts under an output directory, and returns the report
dict it wrote. All randomness comes from the config's named seeds, so a
repeated run produces byte-identical outputs apart from the ``timing``
block.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

from . import analysis, report as rpt, tasks
from .config import DataSource, ExperimentConfig
from .dataset import (
    SplitSpec,
    load_manifest,
    synth_structured,
    synth_texture,
)
from .encoders import Encoder, make_encoder
from .errors import ConfigError, DegenerateCalibrationError
from .image import read_image
from .memory import save_snapshot
from .perturbation import PerturbationKind
from .rng import derive_seed
from .tasks import Item


def _config_echo(config: ExperimentConfig) -> dict:
    # the output location is not part of the experiment identity
    echo = config.to_dict()
    echo.pop("out", None)
    return echo


def load_corpus(source: DataSource, seed: int, role: str = "eval") -> tuple[list[Item], dict[str, str]]:
    """Materialize a data source into items plus an id -> category map."""
    if source.manifest is not None:
        entries = load_manifest(source.manifest)
        items = [(e.id, read_image(e.path)) for e in entries]
        categories = {e.id: e.category for e in entries}
        return items, categories
    synth = source.synth
    gen_seed = derive_seed(seed, f"corpus:{role}")
    prefix = synth.prefix or f"{synth.kind}-{role}"
    if synth.kind == "structured":
        items = synth_structured(synth.n, synth.size, gen_seed, synth.channels, prefix=prefix)
        categories = {item_id: "natural" for item_id, _ in items}
    elif synth.kind == "texture":
        items = synth_texture(synth.n, synth.size, gen_seed, synth.channels,
                              amplitude=synth.amplitude, prefix=prefix)
        categories = {item_id: "texture" for item_id, _ in items}
    else:  # mixed: interleave so splits stay balanced across categories
        n_nat = synth.n // 2
        nat = synth_structured(n_nat, synth.size, gen_seed, synth.channels,
                               prefix=f"{prefix}-nat")
        tex = synth_texture(synth.n - n_nat, synth.size, gen_seed, synth.channels,
                            amplitude=synth.amplitude, prefix=f"{prefix}-tex")
        items = []
        for i in range(max(len(nat), len(tex))):
            if i < len(nat):
                items.append(nat[i])
            if i < len(tex):
                items.append(tex[i])
        categories = {item_id: "natural" for item_id, _ in nat}
        categories.update({item_id: "texture" for item_id, _ in tex})
    return items, categories


def corpus_paths(source: DataSource) -> dict[str, str]:
    """id -> path map for manifest-backed sources (stdio encoders need it)."""
    if source.manifest is None:
        return {}
    return {e.id: e.path for e in load_manifest(source.manifest)}


def _make_experiment_encoder(config: ExperimentConfig, desc) -> Encoder:
    resolver = None
    if desc.kind.value == "stdio":
        paths = corpus_paths(config.eval_data)
        if config.calibration_data is not None:
            paths.update(corpus_paths(config.calibration_data))
        resolver = paths.__getitem__
    return make_encoder(desc, path_resolver=resolver)


def build_encoder(config: ExperimentConfig) -> Encoder:
    """The recall-side encoder (always applied to clean probes)."""
    return _make_experiment_encoder(config, config.encoder)


def build_memorize_encoder(config: ExperimentConfig) -> Encoder:
    """The memorize-side encoder; defaults to the recall encoder."""
    if config.memorize_encoder is None:
        return build_encoder(config)
    enc = _make_experiment_encoder(config, config.memorize_encoder)
    recall_dim = config.encoder.resolved_dim()
    if enc.dim != recall_dim:
        raise ConfigError(
            f"memorize encoder dim {enc.dim} != recall encoder dim {recall_dim}"
        )
    return enc


def _split_eval(config: ExperimentConfig, items: list[Item]):
    spec = SplitSpec(
        memorize=config.split.memorize,
        novel=config.split.novel,
        calibration_novel=config.split.calibration_novel,
        calibration_seen=config.split.calibration_seen,
        seed=config.seeds.split,
    )
    return _split_items(items, spec)


def _split_items(items, spec: SplitSpec):
    from .dataset import split as dataset_split

    return dataset_split(items, spec)


# ---------------------------------------------------------------------------
# forced choice
# ---------------------------------------------------------------------------

def run_forced_choice(config: ExperimentConfig, out_dir: str | Path | None = None) -> dict:
    t0 = time.monotonic()
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    items, categories = load_corpus(config.eval_data, config.seeds.split, "eval")
    parts = _split_eval(config, items)
    n_pairs = config.forced_choice_pairs
    if len(parts.memorize) < n_pairs or len(parts.novel) < n_pairs:
        raise ConfigError(
            f"need at least {n_pairs} memorized and {n_pairs} novel items, "
            f"got {len(parts.memorize)}/{len(parts.novel)}"
        )
    encoder = build_encoder(config)
    store = tasks.memorize(parts.memorize, build_memorize_encoder(config),
                           config.perturbation_spec(),
                           metric=config.metric, normalize=config.normalize)
    pairs = list(zip(parts.memorize[:n_pairs], parts.novel[:n_pairs]))
    result = tasks.forced_choice(store, pairs, encoder)
    failures = analysis.extract_failures(result.trials)
    seen_summary = analysis.summarize_distances(t.d_seen for t in result.trials)
    novel_summary = analysis.summarize_distances(t.d_novel for t in result.trials)

    report = {
        "schema": rpt.REPORT_SCHEMA,
        "task": "forced_choice",
        "config": _config_echo(config),
        "counts": {
            "memorized": len(store),
            "pairs": len(pairs),
            "ties": sum(t.tie for t in result.trials),
        },
        "metrics": {
            "accuracy": result.accuracy,
            "n_correct": result.n_correct,
            "n_failures": len(failures),
        },
        "distance_summary": {
            "seen": seen_summary.to_dict(),
            "novel": novel_summary.to_dict(),
        },
        "failures": [asdict(f) for f in failures],
        "categories": sorted(set(categories.values())),
        "timing": {"seconds": time.monotonic() - t0},
    }
    rpt.write_report(out / "report.json", report)
    rpt.write_trials_csv(out / "trials.csv", result.trials)
    rpt.write_failures_csv(out / "failures.csv", failures)
    return report


# ---------------------------------------------------------------------------
# repeat detection
# ---------------------------------------------------------------------------

def calibrate(config: ExperimentConfig) -> tasks.ThresholdCalibration:
    """Calibrate the alarm threshold on the configured calibration corpus."""
    if config.calibration_data is None:
        raise ConfigError("repeat detection needs a calibration data source")
    cal_items, _ = load_corpus(config.calibration_data, config.seeds.split, "calibration")
    # calibration corpora are always split half seen / half novel
    cal_parts = _split_items(cal_items, SplitSpec(
        memorize=0.5, novel=0.5, seed=derive_seed(config.seeds.split, "calibration"),
    ))
    encoder = build_encoder(config)
    cal_store = tasks.memorize(cal_parts.memorize, build_memorize_encoder(config),
                               config.perturbation_spec(),
                               metric=config.metric, normalize=config.normalize)
    return tasks.calibrate_threshold(cal_store, cal_parts.memorize, cal_parts.novel, encoder)


def run_repeat_detection(config: ExperimentConfig, out_dir: str | Path | None = None) -> dict:
    t0 = time.monotonic()
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    calibration = calibrate(config)
    if calibration.degenerate:
        raise DegenerateCalibrationError(
            f"mean_seen={calibration.mean_seen} >= mean_novel={calibration.mean_novel}"
        )
    items, _ = load_corpus(config.eval_data, config.seeds.split, "eval")
    images = dict(items)
    stream = tasks.make_repeat_stream(
        [item_id for item_id, _ in items],
        length=config.stream_events,
        repeat_rate=config.repeat_rate,
        seed=config.seeds.stream,
    )
    encoder = build_encoder(config)
    metrics = tasks.repeat_detection(stream, images, encoder, config.perturbation_spec(),
                                     calibration.delta,
                                     metric=config.metric, normalize=config.normalize,
                                     memorize_encoder=build_memorize_encoder(config))

    report = {
        "schema": rpt.REPORT_SCHEMA,
        "task": "repeat_detection",
        "config": _config_echo(config),
        "calibration": asdict(calibration),
        "counts": {
            "events": len(stream.events),
            "repeats": metrics.n_repeats,
            "non_repeats": metrics.n_non_repeats,
        },
        "metrics": {
            "hit_rate": metrics.hit_rate,
            "false_alarm_rate": metrics.false_alarm_rate,
            "per_lag": {
                label: {"repeats": b.repeats, "hits": b.hits, "hit_rate": b.hit_rate}
                for label, b in metrics.per_lag.items()
            },
        },
        "timing": {"seconds": time.monotonic() - t0},
    }
    rpt.write_report(out / "report.json", report)
    rpt.write_alarms_csv(out / "alarms.csv", metrics.alarms)
    return report


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_cell(args: tuple) -> tuple[int, float | None, str]:
    index, config_dict, kind, sigma, cell_dir = args
    cfg = ExperimentConfig.from_dict(config_dict)
    cfg = replace(cfg, perturbation_kind=PerturbationKind(kind), perturbation_sigma=sigma)
    try:
        report = run_forced_choice(cfg, cell_dir)
        return index, report["metrics"]["accuracy"], "ok"
    except Exception as exc:  # partial-failure policy: mark the cell, keep going
        return index, None, f"error: {type(exc).__name__}: {exc}"


def run_sweep(config: ExperimentConfig, kinds, sigmas, jobs: int = 1,
              out_dir: str | Path | None = None) -> dict:
    """Forced-choice accuracy over a (perturbation kind, sigma) grid."""
    kinds = [PerturbationKind(k) for k in kinds]
    sigmas = [float(s) for s in sigmas]
    if not kinds or not sigmas:
        raise ConfigError("sweep needs at least one kind and one sigma")
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    _, categories = load_corpus(config.eval_data, config.seeds.split, "eval")
    category = "+".join(sorted(set(categories.values()))) or "natural"

    grid = [(kind, sigma) for kind in kinds for sigma in sigmas]
    cells = [
        (i, config.to_dict(), kind.value, sigma, str(out / f"cell-{kind.value}-{sigma:g}"))
        for i, (kind, sigma) in enumerate(grid)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(cell) for cell in cells]
    results.sort(key=lambda r: r[0])

    rows = []
    series: dict[str, list[tuple[float, float]]] = {}
    for (kind, sigma), (_, accuracy, status) in zip(grid, results):
        rows.append((kind.value, sigma, category, accuracy, status))
        if accuracy is not None:
            series.setdefault(f"{kind.value} / {category}", []).append((sigma, accuracy))

    rpt.write_sweep_csv(out / "sweep.csv", rows)
    (out / "sweep.svg").write_text(
        rpt.svg_line_chart(series, "forced-choice accuracy vs perturbation level",
                           "sigma", "accuracy"),
        encoding="utf-8",
    )
    report = {
        "schema": rpt.REPORT_SCHEMA,
        "task": "sweep",
        "config": _config_echo(config),
        "grid": [
            {"kind": kind.value, "sigma": sigma, "accuracy": acc, "status": status}
            for (kind, sigma), (_, acc, status) in zip(grid, results)
        ],
    }
    rpt.write_report(out / "report.json", report)
    return report


# ---------------------------------------------------------------------------
# pca
# ---------------------------------------------------------------------------

def run_pca(config: ExperimentConfig, out_dir: str | Path | None = None,
            on_clean: bool = False) -> dict:
    """Fit a 2-D PCA on the memory encodings and write the scatter.

    By default the fit uses the stored (perturbed) memory vectors;
    ``on_clean=True`` re-encodes the memorized images without
    perturbation first.
    """
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    items, categories = load_corpus(config.eval_data, config.seeds.split, "eval")
    parts = _split_eval(config, items)
    encoder = build_encoder(config)
    store = tasks.memorize(parts.memorize, build_memorize_encoder(config),
                           config.perturbation_spec(),
                           metric=config.metric, normalize=config.normalize)
    if on_clean:
        vectors = [(item_id, encoder.encode_item(item_id, img)) for item_id, img in parts.memorize]
    else:
        vectors = store.records()
    pca = analysis.fit_pca([vec for _, vec in vectors], k=2)
    points = []
    for item_id, vec in vectors:
        x, y = analysis.project(pca, vec)
        points.append((item_id, categories.get(item_id, "natural"), float(x), float(y)))

    rpt.write_scatter_csv(out / "pca.csv", points)
    (out / "pca.svg").write_text(
        rpt.svg_scatter(points, "memory encodings, principal plane"), encoding="utf-8"
    )
    report = {
        "schema": rpt.REPORT_SCHEMA,
        "task": "pca",
        "config": _config_echo(config),
        "explained_variance": [float(v) for v in pca.explained_variance],
        "points": len(points),
        "on_clean": on_clean,
    }
    rpt.write_report(out / "report.json", report)
    return report


# ---------------------------------------------------------------------------
# memorize-to-snapshot
# ---------------------------------------------------------------------------

def run_memorize(config: ExperimentConfig, out_dir: str | Path | None = None) -> dict:
    """Memorize the configured corpus and write the store snapshot."""
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    items, _ = load_corpus(config.eval_data, config.seeds.split, "eval")
    parts = _split_eval(config, items)
    store = tasks.memorize(parts.memorize, build_memorize_encoder(config),
                           config.perturbation_spec(),
                           metric=config.metric, normalize=config.normalize)
    snapshot = out / "store.emb1"
    count = save_snapshot(snapshot, store)
    report = {
        "schema": rpt.REPORT_SCHEMA,
        "task": "memorize",
        "config": _config_echo(config),
        "records": count,
        "dim": store.dim,
        "snapshot": snapshot.name,
    }
    rpt.write_report(out / "report.json", report)
    return report
