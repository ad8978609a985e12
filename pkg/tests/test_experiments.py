"""Experiment-level behavior: perturbation sweeps and comparative PCA."""

import csv

from vismem.config import DataSource, ExperimentConfig, Seeds, SplitFractions, SynthSpec
from vismem.encoders import EncoderDescriptor, EncoderKind
from vismem.experiments import run_pca, run_sweep
from vismem.perturbation import PerturbationKind

DOWNSAMPLE = EncoderDescriptor(kind=EncoderKind.DOWNSAMPLE, grid=8, channels=3)
RANDPROJ = EncoderDescriptor(kind=EncoderKind.RANDOM_PROJECTION, dim=192, seed=404)


def _config(encoder, synth, pairs=150, seeds=Seeds(31, 32, 33)):
    return ExperimentConfig(
        encoder=encoder,
        eval_data=DataSource(synth=synth),
        split=SplitFractions(memorize=2 / 3, novel=1 / 3),
        seeds=seeds,
        forced_choice_pairs=pairs,
    )


def test_noise_sweep_on_textures_degrades_monotonically(tmp_path):
    cfg = _config(DOWNSAMPLE, SynthSpec(kind="texture", n=450, size=32, amplitude=(5, 8)))
    report = run_sweep(cfg, kinds=["noise"], sigmas=[0, 10, 20, 40], out_dir=tmp_path)
    cells = {g["sigma"]: g["accuracy"] for g in report["grid"]}
    assert all(g["status"] == "ok" for g in report["grid"])
    assert cells[0] == 1.0  # no perturbation: every seen distance is exactly 0
    ordered = [cells[s] for s in (0, 10, 20, 40)]
    for earlier, later in zip(ordered, ordered[1:]):
        assert later <= earlier + 0.05  # non-increasing within sampling noise
    assert ordered[-1] < 0.75  # heavy noise pushes textures toward chance


def test_blur_sweep_on_structured_is_robust(tmp_path):
    # a low-frequency encoder barely notices blur: accuracy at sigma_b=2
    # stays within 0.05 of the blur-free run
    cfg = _config(DOWNSAMPLE, SynthSpec(kind="structured", n=300, size=32), pairs=100)
    report = run_sweep(cfg, kinds=["blur"], sigmas=[0, 2], out_dir=tmp_path)
    cells = {g["sigma"]: g["accuracy"] for g in report["grid"]}
    assert abs(cells[2] - cells[0]) <= 0.05


def test_sweep_marks_failed_cells_and_continues(tmp_path):
    cfg = _config(DOWNSAMPLE, SynthSpec(kind="structured", n=30, size=32), pairs=100)
    # 30 images cannot provide 100 pairs: every cell fails but the sweep completes
    report = run_sweep(cfg, kinds=["noise"], sigmas=[0, 10], out_dir=tmp_path)
    assert all(g["status"].startswith("error:") for g in report["grid"])
    assert (tmp_path / "sweep.csv").exists()


def _bbox_ratio(run_dir):
    with open(run_dir / "pca.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))

    def area(cat):
        xs = [float(r["x"]) for r in rows if r["category"] == cat]
        ys = [float(r["y"]) for r in rows if r["category"] == cat]
        return (max(xs) - min(xs)) * (max(ys) - min(ys))

    return area("texture") / area("natural")


def test_pca_collapse_is_encoder_specific(tmp_path):
    # the coarse-mean encoder packs full-range textures into a tight blob;
    # the distance-preserving random projection does not
    synth = SynthSpec(kind="mixed", n=120, size=32)
    run_pca(_config(DOWNSAMPLE, synth), tmp_path / "down")
    run_pca(_config(RANDPROJ, synth), tmp_path / "rand")
    ratio_down = _bbox_ratio(tmp_path / "down")
    ratio_rand = _bbox_ratio(tmp_path / "rand")
    assert ratio_down < 0.05  # texture blob is tiny next to the structured spread
    assert ratio_rand > 0.25  # random projection keeps the populations comparable
    assert ratio_down < ratio_rand


def test_pca_on_clean_flag_changes_fit(tmp_path):
    cfg = ExperimentConfig(
        encoder=DOWNSAMPLE,
        perturbation_kind=PerturbationKind.GAUSSIAN_NOISE,
        perturbation_sigma=20.0,
        eval_data=DataSource(synth=SynthSpec(kind="mixed", n=60, size=32)),
        seeds=Seeds(41, 42, 43),
    )
    stored = run_pca(cfg, tmp_path / "stored", on_clean=False)
    clean = run_pca(cfg, tmp_path / "clean", on_clean=True)
    assert stored["on_clean"] is False and clean["on_clean"] is True
    assert stored["explained_variance"] != clean["explained_variance"]
