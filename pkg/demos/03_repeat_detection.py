"""Streaming repeat detection with a calibrated alarm threshold.

A separate calibration corpus fixes the threshold delta at the midpoint
of mean seen / mean novel distances. Then 1,200 images stream through:
the engine alarms whenever the incoming image's nearest-neighbor distance
falls below delta, and memorizes every image it sees. Unlike human
observers, the engine's hit rate does not decay with lag — an item seen
1,000 images ago is as detectable as a 1-back repeat.
"""

from vismem.config import DataSource, ExperimentConfig, Seeds, SynthSpec
from vismem.encoders import EncoderDescriptor, EncoderKind
from vismem.experiments import run_repeat_detection
from vismem.perturbation import PerturbationKind

config = ExperimentConfig(
    encoder=EncoderDescriptor(kind=EncoderKind.DOWNSAMPLE, grid=8, channels=3),
    perturbation_kind=PerturbationKind.GAUSSIAN_NOISE,
    perturbation_sigma=10.0,
    eval_data=DataSource(synth=SynthSpec(kind="structured", n=1200, size=64)),
    calibration_data=DataSource(synth=SynthSpec(kind="structured", n=800, size=64)),
    seeds=Seeds(1, 2, 3),
    stream_events=1200,
    repeat_rate=1 / 8,
)

report = run_repeat_detection(config, "runs/demo-repeat")
cal = report["calibration"]
m = report["metrics"]

print(f"calibration: mean_seen {cal['mean_seen']:.4f}, mean_novel {cal['mean_novel']:.4f}"
      f" -> delta {cal['delta']:.4f}")
print(f"stream: {report['counts']['events']} events, {report['counts']['repeats']} repeats")
print(f"hit rate {m['hit_rate']:.3f}, false-alarm rate {m['false_alarm_rate']:.3f}\n")

print("hit rate by lag (intervening items since first exposure):")
for label, bucket in m["per_lag"].items():
    if bucket["repeats"]:
        print(f"  lag {label:>9s}: {bucket['hits']:3d}/{bucket['repeats']:3d}"
              f"  ({bucket['hit_rate']:.2f})")
print("\nno decay with lag: memory is distance, not time")
