import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vismem import MemoryStore, load_snapshot, nearest_bruteforce, save_snapshot
from vismem.errors import DimensionMismatchError, DuplicateIdError, NoRecordsError
from vismem.rng import make_generator


def random_records(rng, n, dim, prefix="r"):
    return [(f"{prefix}{i:05d}", rng.standard_normal(dim).astype(np.float32))
            for i in range(n)]


# ---------------------------------------------------------------------------
# build / insert basics
# ---------------------------------------------------------------------------

def test_empty_store_is_flagged_and_queries_fail():
    store = MemoryStore.build([], dim=4)
    assert store.is_empty and len(store) == 0
    with pytest.raises(NoRecordsError):
        store.nearest([0, 0, 0, 0])
    with pytest.raises(NoRecordsError):
        nearest_bruteforce([], [0.0])


def test_build_two_records():
    store = MemoryStore.build([("a", [0, 0]), ("b", [3, 4])])
    assert len(store) == 2 and store.dim == 2
    assert "a" in store and "c" not in store


def test_traversal_yields_every_id():
    rng = make_generator(31)
    records = random_records(rng, 1000, 768)
    store = MemoryStore.build(records)
    ids = store.ids()
    assert len(ids) == 1000
    assert set(ids) == {rid for rid, _ in records}


def test_insert_then_query_exact_match():
    store = MemoryStore(dim=3)
    store.insert("only", [1.0, 2.0, 3.0])
    res = store.nearest([1.0, 2.0, 3.0])
    assert res.id == "only" and res.distance == 0.0


def test_insert_duplicate_id_rejected():
    store = MemoryStore(dim=2)
    store.insert("a", [0, 0])
    with pytest.raises(DuplicateIdError):
        store.insert("a", [1, 1])
    with pytest.raises(DuplicateIdError):
        MemoryStore.build([("x", [0, 0]), ("x", [1, 1])])


def test_dimension_mismatch_rejected():
    store = MemoryStore(dim=3)
    with pytest.raises(DimensionMismatchError):
        store.insert("a", [1, 2])
    store.insert("a", [1, 2, 3])
    with pytest.raises(DimensionMismatchError):
        store.nearest([1, 2])


# ---------------------------------------------------------------------------
# nearest: hand geometry and oracle equivalence
# ---------------------------------------------------------------------------

def test_nearest_hand_geometry():
    store = MemoryStore.build([("a", [0, 0]), ("b", [3, 4])])
    res = store.nearest([0, 1])
    assert res.id == "a" and res.distance == 1.0


def test_query_equal_to_stored_vector():
    rng = make_generator(32)
    records = random_records(rng, 50, 16)
    store = MemoryStore.build(records)
    rid, vec = records[17]
    res = store.nearest(vec)
    assert res.id == rid and res.distance == 0.0


def test_tie_broken_by_smallest_id():
    # b and a equidistant from the query; "a" must win in both paths
    records = [("b", [1.0, 0.0]), ("a", [-1.0, 0.0])]
    store = MemoryStore.build(records)
    assert store.nearest([0.0, 0.0]).id == "a"
    assert nearest_bruteforce(records, [0.0, 0.0]).id == "a"


def test_bruteforce_single_record():
    res = nearest_bruteforce([("only", [2.0, 0.0])], [0.0, 0.0])
    assert res.id == "only" and res.distance == 2.0


def test_tree_matches_bruteforce_768d():
    rng = make_generator(33)
    records = random_records(rng, 1000, 768)
    store = MemoryStore.build(records)
    for _ in range(200):
        q = rng.standard_normal(768).astype(np.float32)
        tree = store.nearest(q)
        brute = nearest_bruteforce(records, q)
        assert tree.id == brute.id
        assert tree.distance == pytest.approx(brute.distance, rel=1e-9)


def test_insert_stream_equals_batch_build():
    rng = make_generator(34)
    records = random_records(rng, 500, 32)
    batch = MemoryStore.build(records)
    streamed = MemoryStore(dim=32)
    for rid, vec in records:
        streamed.insert(rid, vec)
    for _ in range(100):
        q = rng.standard_normal(32).astype(np.float32)
        a, b = batch.nearest(q), streamed.nearest(q)
        assert a.id == b.id and a.distance == b.distance


def test_cross_check_on_random_instances():
    rng = make_generator(35)
    for trial in range(50):
        n = int(rng.integers(1, 40))
        dim = int(rng.integers(1, 9))
        records = [(f"r{i}", rng.integers(-3, 4, dim).astype(np.float32)) for i in range(n)]
        store = MemoryStore.build(records)
        q = rng.integers(-3, 4, dim).astype(np.float32)
        tree, brute = store.nearest(q), nearest_bruteforce(records, q)
        assert tree.id == brute.id and tree.distance == brute.distance


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def test_metric_axioms():
    rng = make_generator(36)
    a = rng.standard_normal(8).astype(np.float32)
    b = rng.standard_normal(8).astype(np.float32)
    assert MemoryStore.build([("a", a)]).nearest(a).distance == 0.0
    d_ab = MemoryStore.build([("a", a)]).nearest(b).distance
    d_ba = MemoryStore.build([("b", b)]).nearest(a).distance
    assert d_ab == d_ba


def test_insert_never_increases_nearest_distance():
    rng = make_generator(37)
    store = MemoryStore(dim=8)
    q = rng.standard_normal(8).astype(np.float32)
    store.insert("seed", rng.standard_normal(8).astype(np.float32))
    last = store.nearest(q).distance
    for i in range(200):
        store.insert(f"n{i}", rng.standard_normal(8).astype(np.float32))
        d = store.nearest(q).distance
        assert d <= last
        last = d


def test_eval_count_bounded_by_store_size():
    rng = make_generator(38)
    records = random_records(rng, 300, 64)
    store = MemoryStore.build(records)
    for _ in range(20):
        store.nearest(rng.standard_normal(64).astype(np.float32))
        assert store.last_eval_count <= len(store)


def test_pruning_beats_half_linear_scan_low_dim():
    rng = make_generator(39)
    n = 10_000
    records = [(f"r{i:05d}", rng.random(6).astype(np.float32)) for i in range(n)]
    store = MemoryStore.build(records)
    counts = []
    for _ in range(100):
        store.nearest(rng.random(6).astype(np.float32))
        counts.append(store.last_eval_count)
    assert max(counts) <= n
    assert np.mean(counts) < 0.5 * n


def test_cosine_metric_is_l2_on_normalized():
    rng = make_generator(40)
    records = random_records(rng, 80, 12)
    store = MemoryStore.build(records, metric="cosine")
    for _ in range(20):
        q = rng.standard_normal(12).astype(np.float32)
        tree = store.nearest(q)
        brute = nearest_bruteforce(records, q, normalize=True)
        assert tree.id == brute.id and tree.distance == pytest.approx(brute.distance, rel=1e-12)


def test_snapshot_roundtrip(tmp_path):
    rng = make_generator(41)
    records = random_records(rng, 64, 10)
    store = MemoryStore.build(records)
    save_snapshot(tmp_path / "store.emb1", store)
    back = load_snapshot(tmp_path / "store.emb1")
    assert len(back) == len(store)
    for _ in range(20):
        q = rng.standard_normal(10).astype(np.float32)
        a, b = store.nearest(q), back.nearest(q)
        assert a.id == b.id and a.distance == b.distance


# hypothesis: adversarial small instances with plenty of exact ties
@settings(max_examples=200, deadline=None)
@given(
    data=st.data(),
    dim=st.integers(min_value=1, max_value=4),
    n=st.integers(min_value=1, max_value=24),
)
def test_oracle_equivalence_property(data, dim, n):
    coord = st.integers(min_value=-2, max_value=2)
    records = []
    for i in range(n):
        vec = data.draw(st.lists(coord, min_size=dim, max_size=dim))
        records.append((f"r{i:02d}", np.asarray(vec, dtype=np.float32)))
    q = np.asarray(data.draw(st.lists(coord, min_size=dim, max_size=dim)), dtype=np.float32)
    store = MemoryStore.build(records)
    tree = store.nearest(q)
    brute = nearest_bruteforce(records, q)
    assert tree.id == brute.id
    assert tree.distance == brute.distance
