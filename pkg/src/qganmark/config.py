"""Experiment configuration: JSON file + preset + flag overrides.

A config file is a flat JSON object; unknown keys are rejected. Presets
fill defaults for a whole pipeline run: `desk` keeps everything laptop-
sized, `paper` mirrors the full-scale setup (ten backends, 500 epochs,
150-pixel classifier input).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .qgan.generator import NOISELESS_LABEL
from .qgan.training import GanTrainConfig
from .sim.profiles import HardwareProfile, load_profile_suite


@dataclass(frozen=True)
class ExperimentConfig:
    profiles_dir: str | None = None       # None -> bundled suite
    schedule: list | None = None          # [(profile, epochs), ...] for single-model commands
    schedules: list | None = None         # list of schedules for dataset grids
    infer_profiles: list | None = None    # None -> profiles named in the schedules
    gan_epochs: int = 500
    lr_gen: float = 0.2
    lr_disc: float = 0.01
    batch_size: int = 8
    classifier_side: int = 150
    classifier_epochs: int = 15
    classifier_batch: int = 64
    classifier_lr: float = 1e-3
    digits_path: str | None = None        # None -> bundled digits
    digit_label: int | None = 0
    data_subset: int | None = None        # cap on real training images
    images_per_pair: int = 100
    verify_count: int = 100
    out_dir: str = "runs"
    seed: int = 0


PRESETS: dict[str, dict] = {
    "desk": {
        "schedules": [[["ibm_athens", 100]], [["ibm_cambridge", 100]]],
        "gan_epochs": 100,
        "data_subset": 16,
        "images_per_pair": 200,
        "classifier_side": 32,
        "classifier_epochs": 12,
        "verify_count": 100,
    },
    "paper": {
        "schedules": [
            [[name, 500]]
            for name in (
                "ibm_athens", "ibm_bogota", "ibm_burlington", "ibm_jakarta",
                "ibm_nairobi", "ibm_lagos", "ibm_cairo", "ibm_cambridge",
                "ibm_kolkata", "ibm_washington",
            )
        ],
        "gan_epochs": 500,
        "images_per_pair": 100,
        "classifier_side": 150,
        "classifier_epochs": 15,
    },
}

_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def parse_schedule(text) -> list[tuple[str, int]]:
    """'ibm_athens:100+ibm_jakarta:50' or JSON-style [[name, epochs], ...]."""
    if isinstance(text, str):
        entries = []
        for part in text.split("+"):
            name, _, epochs = part.partition(":")
            if not name or not epochs:
                raise ConfigError(f"bad schedule entry {part!r}, expected 'profile:epochs'")
            try:
                entries.append((name.strip(), int(epochs)))
            except ValueError:
                raise ConfigError(f"bad epoch count in schedule entry {part!r}") from None
        return entries
    try:
        return [(str(name), int(epochs)) for name, epochs in text]
    except (TypeError, ValueError):
        raise ConfigError(f"cannot parse schedule {text!r}") from None


def load_config(
    path: str | Path | None = None,
    preset: str | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}, have {sorted(PRESETS)}")
        values.update(PRESETS[preset])
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        unknown = set(doc) - _FIELD_NAMES
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        values.update(doc)
    for key, value in (overrides or {}).items():
        if value is not None:
            if key not in _FIELD_NAMES:
                raise ConfigError(f"unknown config override {key!r}")
            values[key] = value
    cfg = ExperimentConfig(**values)
    if cfg.schedule is not None:
        cfg = replace(cfg, schedule=parse_schedule(cfg.schedule))
    if cfg.schedules is not None:
        cfg = replace(cfg, schedules=[parse_schedule(s) for s in cfg.schedules])
    return cfg


def gan_config(cfg: ExperimentConfig) -> GanTrainConfig:
    return GanTrainConfig(
        epochs=cfg.gan_epochs,
        lr_gen=cfg.lr_gen,
        lr_disc=cfg.lr_disc,
        batch_size=cfg.batch_size,
        seed=cfg.seed,
    )


def resolve_suite(cfg: ExperimentConfig) -> dict[str, HardwareProfile]:
    return load_profile_suite(cfg.profiles_dir)


def resolve_schedule(
    schedule: list[tuple[str, int]], suite: dict[str, HardwareProfile]
) -> list[tuple[HardwareProfile | None, int]]:
    """Profile names to profile objects; 'noiseless' maps to None."""
    resolved = []
    for name, epochs in schedule:
        if epochs < 0:
            raise ConfigError(f"negative epochs for {name}")
        if name == NOISELESS_LABEL:
            resolved.append((None, epochs))
        elif name in suite:
            resolved.append((suite[name], epochs))
        else:
            raise ConfigError(f"schedule references unknown profile {name!r}")
    return resolved


def derived_seed(base: int, *context: int) -> int:
    """Stable per-task seed from the experiment seed and integer context."""
    import numpy as np

    return int(np.random.SeedSequence([base, *context]).generate_state(1)[0])
