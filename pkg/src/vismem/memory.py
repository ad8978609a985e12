"""The system memory: an exact nearest-neighbor k-d tree over embeddings.

Records are ``(id, float32 vector)`` pairs; all distance arithmetic is
done in float64. Queries return the exact Euclidean nearest neighbor via
branch-and-bound with hyperplane pruning, with ties broken by the
lexicographically smallest id — the same rule :func:`nearest_bruteforce`
applies, so the two are interchangeable on any input.

Construction notes:

* ``MemoryStore.build`` makes a balanced tree by splitting at the median
  of the axis with the largest spread (lowest axis index on ties).
* ``insert`` descends and attaches a leaf; no rebalancing. Inserted nodes
  split on ``(parent axis + 1) % dim``.
* Pruning uses a strict comparison against the best distance so far, so
  a far subtree that could hold an equal-distance record with a smaller
  id is still visited; each record's distance is evaluated at most once
  per query (``last_eval_count`` exposes the tally).
* With ``metric="cosine"`` vectors are unit-normalized at the boundary
  and searched with L2, which is monotone in cosine distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import as_embedding
from .errors import DimensionMismatchError, DuplicateIdError, NoRecordsError


@dataclass(frozen=True)
class NearestNeighborResult:
    id: str
    distance: float


def _widen(vec: np.ndarray, normalize: bool) -> np.ndarray:
    v = vec.astype(np.float64)
    if normalize:
        norm = float(np.sqrt(np.sum(v * v)))
        if norm == 0.0:
            raise ValueError("cannot normalize a zero vector")
        v = v / norm
    return v


class MemoryStore:
    """k-d tree over embeddings supporting build, insert and exact nearest."""

    def __init__(self, dim: int, metric: str = "l2", normalize: bool = False):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if metric not in ("l2", "cosine"):
            raise ValueError(f"metric must be 'l2' or 'cosine', got {metric!r}")
        self.dim = dim
        self.metric = metric
        self.normalize = normalize or metric == "cosine"
        self._ids: list[str] = []
        self._id_set: set[str] = set()
        self._raw: list[np.ndarray] = []      # float32 originals, for snapshots
        self._points: list[np.ndarray] = []   # float64 working copies
        # parallel node arrays; node index == record index
        self._axis: list[int] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._root = -1
        self.last_eval_count = 0
        self.total_eval_count = 0

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, records, dim: int | None = None, metric: str = "l2", normalize: bool = False) -> "MemoryStore":
        """Balanced build from ``(id, vector)`` pairs."""
        items = [(str(rid), as_embedding(vec)) for rid, vec in records]
        if dim is None:
            dim = items[0][1].size if items else 1
        store = cls(dim, metric=metric, normalize=normalize)
        for rid, vec in items:
            store._add_record(rid, vec)
        if items:
            store._root = store._build_subtree(np.arange(len(items)))
        return store

    def _add_record(self, rid: str, vec: np.ndarray) -> int:
        if vec.size != self.dim:
            raise DimensionMismatchError(f"record {rid!r}: dim {vec.size}, store dim {self.dim}")
        if rid in self._id_set:
            raise DuplicateIdError(f"duplicate id {rid!r}")
        self._id_set.add(rid)
        self._ids.append(rid)
        self._raw.append(vec)
        self._points.append(_widen(vec, self.normalize))
        self._axis.append(0)
        self._left.append(-1)
        self._right.append(-1)
        return len(self._ids) - 1

    def _build_subtree(self, indices: np.ndarray) -> int:
        if indices.size == 0:
            return -1
        if indices.size == 1:
            node = int(indices[0])
            self._axis[node] = 0
            return node
        pts = np.stack([self._points[i] for i in indices])
        spread = pts.max(axis=0) - pts.min(axis=0)
        axis = int(np.argmax(spread))
        order = indices[np.argsort(pts[:, axis], kind="stable")]
        mid = order.size // 2
        node = int(order[mid])
        self._axis[node] = axis
        self._left[node] = self._build_subtree(order[:mid])
        self._right[node] = self._build_subtree(order[mid + 1 :])
        return node

    def insert(self, rid: str, vec) -> None:
        """Streaming insertion; later queries see the new record."""
        node = self._add_record(str(rid), as_embedding(vec))
        if self._root == -1:
            self._root = node
            return
        point = self._points[node]
        cur = self._root
        while True:
            axis = self._axis[cur]
            side = self._left if point[axis] < self._points[cur][axis] else self._right
            child = side[cur]
            if child == -1:
                side[cur] = node
                self._axis[node] = (axis + 1) % self.dim
                return
            cur = child

    # -- queries ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def is_empty(self) -> bool:
        return not self._ids

    def __contains__(self, rid: str) -> bool:
        return rid in self._id_set

    def ids(self) -> list[str]:
        """All record ids by in-order tree traversal."""
        out: list[str] = []
        stack: list[tuple[int, bool]] = [(self._root, False)]
        while stack:
            node, expanded = stack.pop()
            if node == -1:
                continue
            if expanded:
                out.append(self._ids[node])
            else:
                stack.append((self._right[node], False))
                stack.append((node, True))
                stack.append((self._left[node], False))
        return out

    def records(self):
        """``(id, float32 vector)`` pairs in insertion order (for snapshots)."""
        return list(zip(self._ids, self._raw))

    def nearest(self, query) -> NearestNeighborResult:
        """Exact nearest neighbor; ties go to the smallest id."""
        if self._root == -1:
            raise NoRecordsError("nearest query on an empty store")
        q = as_embedding(query)
        if q.size != self.dim:
            raise DimensionMismatchError(f"query dim {q.size}, store dim {self.dim}")
        q64 = _widen(q, self.normalize)

        best_d2 = np.inf
        best_id: str | None = None
        evals = 0
        # stack entries: (node, lower bound on d^2 for anything in that subtree)
        stack: list[tuple[int, float]] = [(self._root, 0.0)]
        while stack:
            node, bound = stack.pop()
            if node == -1 or bound > best_d2:
                continue
            diff = self._points[node] - q64
            d2 = float(np.sum(diff * diff))
            evals += 1
            rid = self._ids[node]
            if d2 < best_d2 or (d2 == best_d2 and rid < best_id):
                best_d2 = d2
                best_id = rid
            axis = self._axis[node]
            delta = q64[axis] - self._points[node][axis]
            plane_d2 = delta * delta
            if delta < 0:
                near, far = self._left[node], self._right[node]
            else:
                near, far = self._right[node], self._left[node]
            stack.append((far, max(bound, plane_d2)))
            stack.append((near, bound))
        self.last_eval_count = evals
        self.total_eval_count += evals
        return NearestNeighborResult(id=best_id, distance=float(np.sqrt(best_d2)))


def save_snapshot(path, store: MemoryStore) -> int:
    """Persist the records as an EMB1 payload (the tree is never serialized)."""
    from .embedding import write_embedding_file

    return write_embedding_file(path, store.dim, store.records())


def load_snapshot(path, metric: str = "l2", normalize: bool = False) -> MemoryStore:
    """Rebuild a store (balanced) from an EMB1 snapshot."""
    from .embedding import load_embedding_file

    records = load_embedding_file(path)
    dim = next(iter(records.values())).size if records else 1
    return MemoryStore.build(records.items(), dim=dim, metric=metric, normalize=normalize)


def nearest_bruteforce(records, query, normalize: bool = False) -> NearestNeighborResult:
    """Linear-scan oracle with the same tie rule as :meth:`MemoryStore.nearest`.

    Distances are computed with the identical per-record float64 kernel,
    so results match the tree bit for bit.
    """
    items = [(str(rid), as_embedding(vec)) for rid, vec in records]
    if not items:
        raise NoRecordsError("nearest query on an empty record list")
    q = _widen(as_embedding(query), normalize)
    best_d2 = np.inf
    best_id: str | None = None
    for rid, vec in items:
        if vec.size != q.size:
            raise DimensionMismatchError(f"record {rid!r}: dim {vec.size}, query dim {q.size}")
        diff = _widen(vec, normalize) - q
        d2 = float(np.sum(diff * diff))
        if d2 < best_d2 or (d2 == best_d2 and rid < best_id):
            best_d2 = d2
            best_id = rid
    return NearestNeighborResult(id=best_id, distance=float(np.sqrt(best_d2)))
