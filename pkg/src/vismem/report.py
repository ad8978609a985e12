"""Machine-readable experiment outputs: report JSON, trial CSVs, SVG plots.

Reports are written with sorted keys and a fixed layout, so a run
repeated with the same config produces byte-identical files; wall-clock
time lives under the single top-level ``"timing"`` key, which comparison
helpers strip. Plots are standalone SVG with the plotted numbers embedded
in a leading comment block, so no plotting stack is required to read or
regenerate them.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

REPORT_SCHEMA = "report_v1"


def write_report(path: str | Path, report: dict) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def reports_equal_ignoring_timing(a: dict, b: dict) -> bool:
    return render_report(strip_timing(a)) == render_report(strip_timing(b))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

TRIAL_COLUMNS = ["trial", "seen_id", "novel_id", "d_seen", "d_novel", "correct", "tie"]


def write_trials_csv(path: str | Path, trials) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_COLUMNS)
        for t in trials:
            writer.writerow([
                t.index, t.seen_id, t.novel_id,
                repr(t.d_seen), repr(t.d_novel),
                int(t.correct), int(t.tie),
            ])


def read_trials_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["d_seen"] = float(row["d_seen"])
        row["d_novel"] = float(row["d_novel"])
        row["correct"] = bool(int(row["correct"]))
        row["tie"] = bool(int(row["tie"]))
    return rows


def write_failures_csv(path: str | Path, failures) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seen_id", "seen_nn_id", "novel_id", "novel_nn_id", "d_seen", "d_novel"])
        for f in failures:
            writer.writerow([f.seen_id, f.seen_nn_id, f.novel_id, f.novel_nn_id,
                             repr(f.d_seen), repr(f.d_novel)])


ALARM_COLUMNS = ["position", "image_id", "is_repeat", "lag", "d_nn", "fired"]


def write_alarms_csv(path: str | Path, alarms) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ALARM_COLUMNS)
        for a in alarms:
            writer.writerow([
                a.position, a.image_id, int(a.is_repeat),
                "" if a.lag is None else a.lag,
                "" if a.d_nn is None else repr(a.d_nn),
                int(a.fired),
            ])


def read_alarms_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["position"] = int(row["position"])
        row["is_repeat"] = bool(int(row["is_repeat"]))
        row["lag"] = None if row["lag"] == "" else int(row["lag"])
        row["d_nn"] = None if row["d_nn"] == "" else float(row["d_nn"])
        row["fired"] = bool(int(row["fired"]))
    return rows


def write_scatter_csv(path: str | Path, rows) -> None:
    """Rows of (id, category, x, y)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "category", "x", "y"])
        for rid, category, x, y in rows:
            writer.writerow([rid, category, repr(float(x)), repr(float(y))])


def write_sweep_csv(path: str | Path, rows) -> None:
    """Rows of (kind, sigma, category, accuracy, status)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "sigma", "category", "accuracy", "status"])
        for kind, sigma, category, accuracy, status in rows:
            writer.writerow([
                kind, repr(float(sigma)), category,
                "" if accuracy is None else repr(float(accuracy)), status,
            ])


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 40, 60


def _scale(values, lo, hi, out_lo, out_hi):
    if hi == lo:
        return [0.5 * (out_lo + out_hi) for _ in values]
    return [out_lo + (v - lo) * (out_hi - out_lo) / (hi - lo) for v in values]


def _axes(title: str, xlabel: str, ylabel: str, xlo, xhi, ylo, yhi) -> list[str]:
    parts = [
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="24" text-anchor="middle" font-size="15" font-family="sans-serif">{title}</text>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 16}" text-anchor="middle" font-size="12" font-family="sans-serif">{xlabel}</text>',
        f'<text x="18" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 18 {(_MT + _H - _MB) / 2})">{ylabel}</text>',
    ]
    for i in range(5):
        fx = xlo + (xhi - xlo) * i / 4
        fy = ylo + (yhi - ylo) * i / 4
        px = _ML + (_W - _ML - _MR) * i / 4
        py = _H - _MB - (_H - _MT - _MB) * i / 4
        parts.append(f'<text x="{px:.1f}" y="{_H - _MB + 16}" text-anchor="middle" font-size="10" font-family="sans-serif">{fx:.3g}</text>')
        parts.append(f'<text x="{_ML - 6}" y="{py:.1f}" text-anchor="end" font-size="10" font-family="sans-serif">{fy:.3g}</text>')
        parts.append(f'<line x1="{px:.1f}" y1="{_H - _MB}" x2="{px:.1f}" y2="{_H - _MB + 4}" stroke="black"/>')
        parts.append(f'<line x1="{_ML - 4}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" stroke="black"/>')
    return parts


def svg_line_chart(series: dict[str, list[tuple[float, float]]], title: str,
                   xlabel: str, ylabel: str) -> str:
    """Multi-series line chart; data echoed in a leading comment."""
    all_pts = [p for pts in series.values() for p in pts]
    xs = [p[0] for p in all_pts] or [0.0, 1.0]
    ys = [p[1] for p in all_pts] or [0.0, 1.0]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(min(ys), 0.0), max(max(ys), 1.0)
    parts = _axes(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    for i, (label, pts) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        px = _scale([p[0] for p in pts], xlo, xhi, _ML, _W - _MR)
        py = _scale([p[1] for p in pts], ylo, yhi, _H - _MB, _MT)
        coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in zip(px, py))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in zip(px, py):
            parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="{color}"/>')
        ly = _MT + 14 + 16 * i
        parts.append(f'<rect x="{_W - _MR - 150}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{_W - _MR - 135}" y="{ly}" font-size="11" font-family="sans-serif">{label}</text>')
    data = json.dumps({label: pts for label, pts in series.items()}, sort_keys=True)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">\n'
        f"<!-- data: {data} -->\n" + "\n".join(parts) + "\n</svg>\n"
    )


def svg_scatter(points, title: str, xlabel: str = "pc1", ylabel: str = "pc2") -> str:
    """Scatter of (id, category, x, y) rows, one color per category."""
    points = list(points)
    xs = [p[2] for p in points] or [0.0, 1.0]
    ys = [p[3] for p in points] or [0.0, 1.0]
    xlo, xhi, ylo, yhi = min(xs), max(xs), min(ys), max(ys)
    parts = _axes(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    categories = sorted({p[1] for p in points})
    colors = {cat: _PALETTE[i % len(_PALETTE)] for i, cat in enumerate(categories)}
    px = _scale(xs, xlo, xhi, _ML, _W - _MR)
    py = _scale(ys, ylo, yhi, _H - _MB, _MT)
    for (rid, cat, _, _), x, y in zip(points, px, py):
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.5" fill="{colors[cat]}" fill-opacity="0.7"/>')
    for i, cat in enumerate(categories):
        ly = _MT + 14 + 16 * i
        parts.append(f'<rect x="{_W - _MR - 110}" y="{ly - 9}" width="10" height="10" fill="{colors[cat]}"/>')
        parts.append(f'<text x="{_W - _MR - 95}" y="{ly}" font-size="11" font-family="sans-serif">{cat}</text>')
    data = json.dumps([[p[0], p[1], p[2], p[3]] for p in points])
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">\n'
        f"<!-- data: {data} -->\n" + "\n".join(parts) + "\n</svg>\n"
    )
