"""Command-line entry point.

Subcommands: ingest, perturb, memorize, calibrate, eval-fc, eval-repeat,
sweep, pca, report. Most take ``--config <path>`` (JSON, schema
``config_v1``) plus overrides. Exit codes:

    0  all requested work completed
    1  unexpected internal error
    2  configuration / usage error
    3  I/O error (missing or unreadable files)
    4  degenerate calibration (mean seen >= mean novel)
    5  external encoder unavailable or protocol violation

On failure a machine-readable ``{"error", "message", "exit_code"}``
object is printed to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments, report as rpt
from .config import ExperimentConfig, load_config
from .dataset import (
    ManifestEntry,
    load_manifest,
    missing_paths,
    synth_structured,
    synth_texture,
    write_manifest,
)
from .errors import (
    ConfigError,
    DegenerateCalibrationError,
    ExternalUnavailableError,
    ProtocolViolationError,
    VismemError,
)
from .image import read_image, write_png
from .perturbation import PerturbationKind, PerturbationSpec, perturb


def _fail(code: int, exc: BaseException) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    seeds = config.seeds
    if args.seed_split is not None:
        seeds = replace(seeds, split=args.seed_split)
    if args.seed_perturbation is not None:
        seeds = replace(seeds, perturbation=args.seed_perturbation)
    if args.seed_stream is not None:
        seeds = replace(seeds, stream=args.seed_stream)
    config = replace(config, seeds=seeds)
    if args.metric is not None:
        config = replace(config, metric=args.metric)
    if args.normalize:
        config = replace(config, normalize=True)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    return config


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment config JSON")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--metric", choices=["l2", "cosine"])
    parser.add_argument("--normalize", action="store_true",
                        help="unit-normalize embeddings before storage")
    parser.add_argument("--seed-split", type=int, dest="seed_split")
    parser.add_argument("--seed-perturbation", type=int, dest="seed_perturbation")
    parser.add_argument("--seed-stream", type=int, dest="seed_stream")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vismem",
        description="Visual memory engine: perturb, encode, store, recall.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a manifest from a directory or a synthetic corpus")
    p.add_argument("--out", required=True, help="manifest path to write")
    p.add_argument("--dir", help="directory of .png/.raw images to index")
    p.add_argument("--category", default="natural", choices=["natural", "texture"])
    p.add_argument("--synth", choices=["structured", "texture"],
                   help="generate a synthetic corpus instead of scanning a directory")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", help="texture contrast: INT or LO,HI")
    p.add_argument("--image-dir", help="where synthetic PNGs are written (default: next to manifest)")

    p = sub.add_parser("perturb", help="write perturbed copies of a manifest's images")
    p.add_argument("--manifest", required=True)
    p.add_argument("--kind", required=True, choices=[k.value for k in PerturbationKind])
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--out-manifest", required=True)

    for name, helptext in [
        ("memorize", "memorize the configured corpus and write an EMB1 snapshot"),
        ("calibrate", "compute the repeat-detection threshold"),
        ("eval-fc", "run the forced-choice experiment"),
        ("eval-repeat", "run the repeat-detection experiment"),
        ("sweep", "forced-choice accuracy over a perturbation grid"),
        ("pca", "project memory encodings onto the principal plane"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "sweep":
            p.add_argument("--kinds", default="noise", help="comma-separated perturbation kinds")
            p.add_argument("--sigmas", default="0,10,20,40", help="comma-separated sigma values")
            p.add_argument("--jobs", type=int, default=1)
        if name == "pca":
            p.add_argument("--clean", action="store_true",
                           help="fit on clean (unperturbed) encodings instead of stored ones")

    p = sub.add_parser("report", help="verify a run directory: recompute metrics from its CSVs")
    p.add_argument("--run", required=True, help="directory containing report.json")

    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_ingest(args) -> int:
    out_path = Path(args.out)
    if args.synth:
        image_dir = Path(args.image_dir) if args.image_dir else out_path.parent / "images"
        image_dir.mkdir(parents=True, exist_ok=True)
        if args.synth == "structured":
            items = synth_structured(args.n, args.size, args.seed)
            category = "natural"
        else:
            amplitude = None
            if args.amplitude:
                parts = args.amplitude.split(",")
                amplitude = int(parts[0]) if len(parts) == 1 else (int(parts[0]), int(parts[1]))
            items = synth_texture(args.n, args.size, args.seed, amplitude=amplitude)
            category = "texture"
        entries = []
        for item_id, img in items:
            path = image_dir / f"{item_id}.png"
            write_png(path, img)
            entries.append(ManifestEntry(item_id, str(path), category))
    elif args.dir:
        root = Path(args.dir)
        if not root.is_dir():
            raise FileNotFoundError(f"not a directory: {root}")
        files = sorted(p for p in root.iterdir() if p.suffix.lower() in (".png", ".raw"))
        entries = [ManifestEntry(p.stem, str(p), args.category) for p in files]
    else:
        raise ConfigError("ingest needs --dir or --synth")
    write_manifest(out_path, entries)
    missing = missing_paths(entries)
    print(json.dumps({"manifest": str(out_path), "entries": len(entries), "missing": missing}))
    return 0


def _cmd_perturb(args) -> int:
    entries = load_manifest(args.manifest)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = PerturbationSpec(PerturbationKind(args.kind), args.sigma, args.seed)
    new_entries = []
    for e in entries:
        img = read_image(e.path)
        noisy = perturb(img, spec.for_item(e.id))
        path = out_dir / f"{e.id}.png"
        write_png(path, noisy)
        new_entries.append(ManifestEntry(e.id, str(path), e.category))
    write_manifest(args.out_manifest, new_entries)
    print(json.dumps({
        "manifest": args.out_manifest,
        "entries": len(new_entries),
        "kind": spec.kind.value,
        "sigma": spec.sigma,
        "seed": spec.seed,
    }))
    return 0


def _cmd_calibrate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    calibration = experiments.calibrate(config)
    out = Path(args.out if args.out is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "mean_seen": calibration.mean_seen,
        "mean_novel": calibration.mean_novel,
        "delta": calibration.delta,
        "degenerate": calibration.degenerate,
    }
    (out / "calibration.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    print(json.dumps(payload, sort_keys=True))
    if calibration.degenerate:
        raise DegenerateCalibrationError(
            f"mean_seen={calibration.mean_seen} >= mean_novel={calibration.mean_novel}"
        )
    return 0


def _cmd_report(args) -> int:
    run_dir = Path(args.run)
    report = rpt.load_report(run_dir / "report.json")
    task = report.get("task")
    problems: list[str] = []
    if task == "forced_choice":
        rows = rpt.read_trials_csv(run_dir / "trials.csv")
        if len(rows) != report["counts"]["pairs"]:
            problems.append(f"trial count {len(rows)} != reported {report['counts']['pairs']}")
        accuracy = sum(r["correct"] for r in rows) / len(rows) if rows else 0.0
        if abs(accuracy - report["metrics"]["accuracy"]) > 1e-12:
            problems.append(f"accuracy from CSV {accuracy} != reported {report['metrics']['accuracy']}")
    elif task == "repeat_detection":
        rows = rpt.read_alarms_csv(run_dir / "alarms.csv")
        repeats = [r for r in rows if r["is_repeat"]]
        non_repeats = [r for r in rows if not r["is_repeat"]]
        hit = sum(r["fired"] for r in repeats) / len(repeats) if repeats else None
        fa = sum(r["fired"] for r in non_repeats) / len(non_repeats) if non_repeats else None
        if hit != report["metrics"]["hit_rate"] and (
            hit is None or abs(hit - report["metrics"]["hit_rate"]) > 1e-12
        ):
            problems.append(f"hit_rate from CSV {hit} != reported {report['metrics']['hit_rate']}")
        if fa != report["metrics"]["false_alarm_rate"] and (
            fa is None or abs(fa - report["metrics"]["false_alarm_rate"]) > 1e-12
        ):
            problems.append(f"false_alarm_rate from CSV {fa} != reported {report['metrics']['false_alarm_rate']}")
    else:
        problems.append(f"nothing to verify for task {task!r}")
    print(json.dumps({"run": str(run_dir), "task": task, "verified": not problems,
                      "problems": problems}, sort_keys=True))
    return 0 if not problems else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "perturb":
            return _cmd_perturb(args)
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        if args.command == "report":
            return _cmd_report(args)

        config = _apply_overrides(load_config(args.config), args)
        if args.command == "memorize":
            report = experiments.run_memorize(config)
            print(json.dumps({"task": "memorize", "records": report["records"],
                              "dim": report["dim"], "out": config.out_dir}))
        elif args.command == "eval-fc":
            report = experiments.run_forced_choice(config)
            print(json.dumps({"task": "forced_choice",
                              "accuracy": report["metrics"]["accuracy"],
                              "out": config.out_dir}))
        elif args.command == "eval-repeat":
            report = experiments.run_repeat_detection(config)
            print(json.dumps({"task": "repeat_detection",
                              "hit_rate": report["metrics"]["hit_rate"],
                              "false_alarm_rate": report["metrics"]["false_alarm_rate"],
                              "out": config.out_dir}))
        elif args.command == "sweep":
            kinds = [k for k in args.kinds.split(",") if k]
            sigmas = [float(s) for s in args.sigmas.split(",") if s]
            report = experiments.run_sweep(config, kinds, sigmas, jobs=args.jobs)
            failed = [g for g in report["grid"] if g["status"] != "ok"]
            print(json.dumps({"task": "sweep", "cells": len(report["grid"]),
                              "failed": len(failed), "out": config.out_dir}))
            return 0 if not failed else 1
        elif args.command == "pca":
            report = experiments.run_pca(config, on_clean=args.clean)
            print(json.dumps({"task": "pca",
                              "explained_variance": report["explained_variance"],
                              "out": config.out_dir}))
        return 0
    except DegenerateCalibrationError as exc:
        return _fail(4, exc)
    except (ExternalUnavailableError, ProtocolViolationError) as exc:
        return _fail(5, exc)
    except ConfigError as exc:
        return _fail(2, exc)
    except (OSError, FileNotFoundError) as exc:
        return _fail(3, exc)
    except VismemError as exc:
        return _fail(2, exc)
    except Exception as exc:  # pragma: no cover - defensive
        return _fail(1, exc)


if __name__ == "__main__":
    sys.exit(main())
