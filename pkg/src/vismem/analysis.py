"""Post-hoc analysis: PCA of memory encodings, distance summaries,
failure-case extraction.

PCA is fit on the sample covariance (1/(n-1) normalization) via a
symmetric eigendecomposition. Two conventions make results reproducible:
rows are accumulated in a canonical (sorted) order so fitting is exactly
permutation-invariant, and each component's largest-magnitude entry is
forced positive to resolve the +/-v eigenvector ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoders import Encoder
from .errors import (
    DegenerateVarianceError,
    DimensionMismatchError,
    InsufficientDataError,
)
from .memory import MemoryStore
from .tasks import recall_distance

PERCENTILES = (0, 5, 25, 50, 75, 95, 100)


@dataclass
class PcaProjection:
    mean: np.ndarray                 # (dim,)
    components: np.ndarray           # (k, dim), orthonormal rows
    explained_variance: np.ndarray   # (k,), descending

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def k(self) -> int:
        return self.components.shape[0]


def _as_float64(vec) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains NaN or infinity")
    return arr


def fit_pca(embeddings, k: int = 2) -> PcaProjection:
    """Top-k principal axes of a batch of embeddings."""
    X = np.stack([_as_float64(e) for e in embeddings])
    n, dim = X.shape
    if k < 1 or k > dim:
        raise InsufficientDataError(f"k must be in [1, dim={dim}], got {k}")
    if n < k + 1:
        raise InsufficientDataError(f"need at least {k + 1} embeddings, got {n}")
    # canonical row order: permutation-invariant accumulation
    X = X[np.lexsort(X.T[::-1])]
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    total_var = float(np.trace(cov))
    if total_var <= 0.0:
        raise DegenerateVarianceError("all embeddings are identical")
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:k]
    values = np.clip(eigvals[order], 0.0, None)
    components = eigvecs[:, order].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaProjection(mean=mean, components=components, explained_variance=values)


def project(pca: PcaProjection, embedding) -> np.ndarray:
    """Coordinates of one embedding in the fitted principal plane."""
    e = _as_float64(embedding)
    if e.size != pca.dim:
        raise DimensionMismatchError(f"embedding dim {e.size}, PCA dim {pca.dim}")
    return (e - pca.mean) @ pca.components.T


def project_batch(pca: PcaProjection, embeddings) -> np.ndarray:
    return np.stack([project(pca, e) for e in embeddings])


# ---------------------------------------------------------------------------
# distance summaries
# ---------------------------------------------------------------------------

@dataclass
class DistanceSummary:
    count: int
    mean: float
    std: float
    percentiles: dict[int, float]
    histogram_edges: list[float]
    histogram_counts: list[int]
    distances: np.ndarray

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "std": self.std,
            "percentiles": {str(p): v for p, v in self.percentiles.items()},
            "histogram_edges": self.histogram_edges,
            "histogram_counts": self.histogram_counts,
        }


def _freedman_diaconis_edges(values: np.ndarray) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.array([lo, hi if hi > lo else lo + 1.0])
    q75, q25 = np.percentile(values, [75, 25])
    width = 2.0 * (q75 - q25) / len(values) ** (1.0 / 3.0)
    if width <= 0:
        bins = 1
    else:
        bins = int(np.clip(np.ceil((hi - lo) / width), 1, 10_000))
    return np.linspace(lo, hi, bins + 1)


def summarize_distances(distances) -> DistanceSummary:
    d = np.asarray(list(distances), dtype=np.float64)
    if d.size == 0:
        raise InsufficientDataError("no distances to summarize")
    edges = _freedman_diaconis_edges(d)
    counts, _ = np.histogram(d, bins=edges)
    return DistanceSummary(
        count=int(d.size),
        mean=float(d.mean()),
        std=float(d.std()),
        percentiles={p: float(np.percentile(d, p)) for p in PERCENTILES},
        histogram_edges=[float(e) for e in edges],
        histogram_counts=[int(c) for c in counts],
        distances=d,
    )


def distance_stats(store: MemoryStore, items, encoder: Encoder) -> DistanceSummary:
    """Recall-distance summary for a batch of images."""
    return summarize_distances(
        recall_distance(store, img, encoder, item_id).distance for item_id, img in items
    )


# ---------------------------------------------------------------------------
# failure cases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FailureCase:
    seen_id: str
    seen_nn_id: str
    novel_id: str
    novel_nn_id: str
    d_seen: float
    d_novel: float


def extract_failures(trials) -> list[FailureCase]:
    """One record per incorrect forced-choice trial (ties included)."""
    out = []
    for t in trials:
        if not t.correct:
            out.append(FailureCase(
                seen_id=t.seen_id,
                seen_nn_id=t.seen_nn_id,
                novel_id=t.novel_id,
                novel_nn_id=t.novel_nn_id,
                d_seen=t.d_seen,
                d_novel=t.d_novel,
            ))
    return out
