import json

import numpy as np
import pytest

from vismem import (
    DownsampleMeanEncoder,
    ManifestEntry,
    PerturbationKind,
    PerturbationSpec,
    SplitSpec,
    load_manifest,
    perturb,
    split,
    synth_structured,
    synth_texture,
    write_manifest,
)
from vismem.errors import DuplicateIdError, FractionError, ParseError


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------

def test_empty_manifest(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text("")
    assert load_manifest(path) == []


def test_manifest_roundtrip_preserves_order(tmp_path):
    entries = [
        ManifestEntry("b", "/x/b.png", "natural"),
        ManifestEntry("a", "/x/a.png", "texture"),
        ManifestEntry("c", "/x/c.png", "natural"),
    ]
    path = tmp_path / "m.jsonl"
    write_manifest(path, entries)
    assert load_manifest(path) == entries


def test_manifest_duplicate_id_reports_line(tmp_path):
    path = tmp_path / "m.jsonl"
    lines = [
        {"id": "a", "path": "a.png", "category": "natural"},
        {"id": "a", "path": "b.png", "category": "natural"},
    ]
    path.write_text("\n".join(json.dumps(l) for l in lines) + "\n")
    with pytest.raises(DuplicateIdError, match="line 2"):
        load_manifest(path)


def test_manifest_parse_errors(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text('{"id": "a", "path": "p"}\n')  # missing category
    with pytest.raises(ParseError, match="line 1"):
        load_manifest(path)
    path.write_text("{not json}\n")
    with pytest.raises(ParseError):
        load_manifest(path)
    path.write_text('{"id": "a", "path": "p", "category": "weird"}\n')
    with pytest.raises(ParseError):
        load_manifest(path)


# ---------------------------------------------------------------------------
# splits
# ---------------------------------------------------------------------------

def entries(n):
    return [ManifestEntry(f"e{i:04d}", f"{i}.png", "natural") for i in range(n)]


def test_split_half_half():
    parts = split(entries(10), SplitSpec(memorize=0.5, novel=0.5, seed=3))
    assert len(parts.memorize) == 5 and len(parts.novel) == 5
    assert not set(e.id for e in parts.memorize) & set(e.id for e in parts.novel)


def test_split_is_deterministic():
    a = split(entries(40), SplitSpec(memorize=0.4, novel=0.3, calibration_novel=0.2,
                                     calibration_seen=0.5, seed=9))
    b = split(entries(40), SplitSpec(memorize=0.4, novel=0.3, calibration_novel=0.2,
                                     calibration_seen=0.5, seed=9))
    assert [e.id for e in a.memorize] == [e.id for e in b.memorize]
    assert [e.id for e in a.calibration_novel] == [e.id for e in b.calibration_novel]


def test_split_large_corpus_proportions():
    parts = split(entries(5000), SplitSpec(memorize=0.5, novel=0.5, seed=0))
    assert len(parts.memorize) == 2500


def test_split_subset_relations():
    parts = split(entries(100), SplitSpec(memorize=0.6, novel=0.2, calibration_novel=0.2,
                                          calibration_seen=0.25, seed=4))
    mem_ids = {e.id for e in parts.memorize}
    assert {e.id for e in parts.calibration_seen} <= mem_ids
    assert len(parts.calibration_seen) == 15  # 0.25 * 60
    for a, b in [(parts.memorize, parts.novel), (parts.memorize, parts.calibration_novel),
                 (parts.novel, parts.calibration_novel)]:
        assert not {e.id for e in a} & {e.id for e in b}


def test_split_fraction_validation():
    with pytest.raises(FractionError):
        SplitSpec(memorize=0.7, novel=0.5)
    with pytest.raises(FractionError):
        SplitSpec(memorize=-0.1)
    with pytest.raises(FractionError):
        SplitSpec(calibration_seen=1.5)


# ---------------------------------------------------------------------------
# synthetic corpora
# ---------------------------------------------------------------------------

def test_synth_determinism():
    a = synth_structured(5, 32, seed=7)
    b = synth_structured(5, 32, seed=7)
    for (ida, ia), (idb, ib) in zip(a, b):
        assert ida == idb and np.array_equal(ia.pixels, ib.pixels)
    t1 = synth_texture(5, 32, seed=7)
    t2 = synth_texture(5, 32, seed=7)
    for (ida, ia), (idb, ib) in zip(t1, t2):
        assert ida == idb and np.array_equal(ia.pixels, ib.pixels)


def test_synth_single_image_is_valid():
    [(rid, img)] = synth_structured(1, 16, seed=0)
    assert img.width == img.height == 16 and img.channels == 3


def test_structured_separation_exceeds_noise_displacement():
    # minimum pairwise embedding distance must dominate the expected
    # sigma_n=20 displacement by a factor 10 (analytic and empirical)
    enc = DownsampleMeanEncoder(8)
    items = synth_structured(100, 64, seed=5)
    E = np.stack([enc.encode(img).astype(np.float64) for _, img in items])
    iu = np.triu_indices(len(items), k=1)
    min_pair = np.sqrt(((E[:, None, :] - E[None, :, :]) ** 2).sum(axis=2)[iu].min())

    analytic_disp = np.sqrt(enc.dim) * 20.0 / (255.0 * (64 // 8))
    spec = PerturbationSpec(PerturbationKind.GAUSSIAN_NOISE, 20.0, 7)
    empirical = []
    for item_id, img in items[:30]:
        clean = enc.encode(img).astype(np.float64)
        noisy = enc.encode(perturb(img, spec.for_item(item_id))).astype(np.float64)
        empirical.append(np.linalg.norm(noisy - clean))
    assert min_pair > 10 * analytic_disp
    assert min_pair > 10 * np.mean(empirical)


def test_texture_pixel_mean_near_midgray():
    for _, img in synth_texture(5, 256, seed=8):
        assert abs(img.pixels.mean() - 127.5) < 2.0


def test_texture_collapse_under_coarse_encoder():
    # max pairwise texture distance < min pairwise structured distance
    enc = DownsampleMeanEncoder(8)
    textures = synth_texture(100, 128, seed=6)
    structured = synth_structured(100, 128, seed=7)
    TE = np.stack([enc.encode(img).astype(np.float64) for _, img in textures])
    SE = np.stack([enc.encode(img).astype(np.float64) for _, img in structured])
    iu = np.triu_indices(100, k=1)
    t_max = np.sqrt(((TE[:, None, :] - TE[None, :, :]) ** 2).sum(axis=2)[iu].max())
    s_min = np.sqrt(((SE[:, None, :] - SE[None, :, :]) ** 2).sum(axis=2)[iu].min())
    assert t_max < s_min


def test_texture_amplitude_variants():
    fixed = synth_texture(3, 32, seed=1, amplitude=6)
    for _, img in fixed:
        assert img.pixels.min() >= 122 and img.pixels.max() <= 134
    ranged = synth_texture(10, 32, seed=2, amplitude=(5, 8))
    for _, img in ranged:
        assert img.pixels.min() >= 120 and img.pixels.max() <= 136
    with pytest.raises(ValueError):
        synth_texture(1, 32, seed=0, amplitude=0)


def test_synth_argument_validation():
    with pytest.raises(ValueError):
        synth_structured(0, 32, 0)
    with pytest.raises(ValueError):
        synth_texture(0, 32, 0)
