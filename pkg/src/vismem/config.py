"""Experiment configuration: a versioned, fully serializable JSON schema.

A config plus the code version pins a run bit for bit: the three named
seeds (split, perturbation, stream) are the only entropy sources, and
they are echoed into every report. Missing sections fall back to the
defaults below, so small configs stay small.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .encoders import EncoderDescriptor, EncoderKind
from .errors import ConfigError
from .perturbation import PerturbationKind, PerturbationSpec

CONFIG_SCHEMA = "config_v1"


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic corpus.

    ``mixed`` interleaves half structured, half texture images (useful
    for PCA scatters that compare the two populations in one memory).
    """

    kind: str = "structured"          # "structured" | "texture" | "mixed"
    n: int = 200
    size: int = 64
    channels: int = 3
    amplitude: int | tuple[int, int] | None = None  # texture contrast; None = full range
    prefix: str | None = None

    def __post_init__(self):
        if self.kind not in ("structured", "texture", "mixed"):
            raise ConfigError(f"synth kind must be structured|texture|mixed, got {self.kind!r}")
        if self.n < 1:
            raise ConfigError("synth n must be >= 1")


@dataclass(frozen=True)
class DataSource:
    """Either a manifest file or a synthetic recipe."""

    manifest: str | None = None
    synth: SynthSpec | None = None

    def __post_init__(self):
        if (self.manifest is None) == (self.synth is None):
            raise ConfigError("data source needs exactly one of manifest | synth")


@dataclass(frozen=True)
class Seeds:
    split: int = 1
    perturbation: int = 2
    stream: int = 3


@dataclass(frozen=True)
class SplitFractions:
    memorize: float = 0.5
    novel: float = 0.5
    calibration_novel: float = 0.0
    calibration_seen: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    encoder: EncoderDescriptor
    # optional separate encoder for the memorize side: the full-scale
    # path stores embeddings of pre-perturbed images (one EMB1 file)
    # while recall reads clean ones (another); None = same encoder
    memorize_encoder: EncoderDescriptor | None = None
    perturbation_kind: PerturbationKind = PerturbationKind.NONE
    perturbation_sigma: float = 0.0
    eval_data: DataSource = field(default_factory=lambda: DataSource(synth=SynthSpec()))
    calibration_data: DataSource | None = None
    split: SplitFractions = field(default_factory=SplitFractions)
    seeds: Seeds = field(default_factory=Seeds)
    metric: str = "l2"
    normalize: bool = False
    forced_choice_pairs: int = 100
    stream_events: int = 1000
    repeat_rate: float = 0.125
    out_dir: str = "runs/out"

    def perturbation_spec(self) -> PerturbationSpec:
        return PerturbationSpec(
            kind=self.perturbation_kind,
            sigma=self.perturbation_sigma,
            seed=self.seeds.perturbation,
        )

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "schema": CONFIG_SCHEMA,
            "encoder": _encoder_to_dict(self.encoder),
            "perturbation": {"kind": self.perturbation_kind.value, "sigma": self.perturbation_sigma},
            "data": {
                "eval": _source_to_dict(self.eval_data),
                "calibration": None if self.calibration_data is None else _source_to_dict(self.calibration_data),
            },
            "split": asdict(self.split),
            "seeds": asdict(self.seeds),
            "metric": self.metric,
            "normalize": self.normalize,
            "forced_choice": {"pairs": self.forced_choice_pairs},
            "repeat_detection": {"events": self.stream_events, "repeat_rate": self.repeat_rate},
            "out": self.out_dir,
        }
        if self.memorize_encoder is not None:
            out["memorize_encoder"] = _encoder_to_dict(self.memorize_encoder)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        schema = obj.get("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r}")
        try:
            enc = _encoder_from_dict(obj.get("encoder") or {})
            mem_enc_raw = obj.get("memorize_encoder")
            mem_enc = None if mem_enc_raw is None else _encoder_from_dict(mem_enc_raw)
            pert = obj.get("perturbation") or {}
            kind = PerturbationKind(pert.get("kind", "none"))
            sigma = float(pert.get("sigma", 0.0))
            data = obj.get("data") or {}
            eval_data = _source_from_dict(data.get("eval") or {"synth": {}})
            cal_raw = data.get("calibration")
            cal_data = None if cal_raw is None else _source_from_dict(cal_raw)
            split = SplitFractions(**(obj.get("split") or {}))
            seeds = Seeds(**(obj.get("seeds") or {}))
            fc = obj.get("forced_choice") or {}
            rd = obj.get("repeat_detection") or {}
            return cls(
                encoder=enc,
                memorize_encoder=mem_enc,
                perturbation_kind=kind,
                perturbation_sigma=sigma,
                eval_data=eval_data,
                calibration_data=cal_data,
                split=split,
                seeds=seeds,
                metric=obj.get("metric", "l2"),
                normalize=bool(obj.get("normalize", False)),
                forced_choice_pairs=int(fc.get("pairs", 100)),
                stream_events=int(rd.get("events", 1000)),
                repeat_rate=float(rd.get("repeat_rate", 0.125)),
                out_dir=str(obj.get("out", "runs/out")),
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc


def _encoder_to_dict(desc: EncoderDescriptor) -> dict:
    enc = {k: v for k, v in asdict(desc).items() if v not in (None, "")}
    enc["kind"] = desc.kind.value
    if desc.command is not None:
        enc["command"] = list(desc.command)
    return enc


def _source_to_dict(src: DataSource) -> dict:
    if src.manifest is not None:
        return {"manifest": src.manifest}
    synth = {k: v for k, v in asdict(src.synth).items() if v is not None}
    if isinstance(src.synth.amplitude, tuple):
        synth["amplitude"] = list(src.synth.amplitude)
    return {"synth": synth}


def _source_from_dict(obj: dict) -> DataSource:
    if "manifest" in obj and obj["manifest"] is not None:
        return DataSource(manifest=str(obj["manifest"]))
    raw = dict(obj.get("synth") or {})
    amp = raw.get("amplitude")
    if isinstance(amp, list):
        raw["amplitude"] = (int(amp[0]), int(amp[1]))
    return DataSource(synth=SynthSpec(**raw))


def _encoder_from_dict(obj: dict) -> EncoderDescriptor:
    if "kind" not in obj:
        raise ConfigError("encoder config needs a kind")
    kind = EncoderKind(obj["kind"])
    command = obj.get("command")
    return EncoderDescriptor(
        kind=kind,
        name=obj.get("name", ""),
        dim=obj.get("dim"),
        grid=obj.get("grid"),
        seed=int(obj.get("seed", 0)),
        channels=int(obj.get("channels", 3)),
        path=obj.get("path"),
        command=None if command is None else tuple(command),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(obj)


def save_config(path: str | Path, config: ExperimentConfig) -> None:
    Path(path).write_text(
        json.dumps(config.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
