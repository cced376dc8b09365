"""Run configuration: one JSON file drives every CLI subcommand.

All tunable thresholds live here with defaults matching the documented
pipeline behavior. Example:

    {
      "scene": "scene.json",
      "mode": "oracle",
      "seed": 7,
      "out_dir": "out",
      "camera_id": 0,
      "fps": 30,
      "edge": {"noise_sigma": 0, "detect_threshold": 25,
               "background_alpha": 0.05,
               "tracker": {"iou_threshold": 0.2, "miss_timeout": 10,
                            "velocity_alpha": 0.5}},
      "classifier": {"fall_vy_frac": 0.08, "fallen_spine_deg": 60},
      "reorder": {"capacity": 64, "gap_frames": 30, "gap_seconds": 2.0},
      "transport": {"kind": "in-process"},
      "debug": {"dump_desensitized": false, "dump_composite": false,
                 "dump_raw": false, "unsafe_dump_raw": false}
    }

Unknown keys are rejected so typos fail loudly. The pipeline mode lives at
the top level; the edge section carries only thresholds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .cloud.classify import ClassifierParams
from .edge.pipeline import EdgeParams
from .edge.track import TrackerParams
from .errors import ConfigurationError


@dataclass(frozen=True)
class ReorderParams:
    capacity: int = 64
    gap_frames: int = 30
    gap_seconds: float = 2.0


@dataclass(frozen=True)
class TransportConfig:
    kind: str = "in-process"  # in-process | file | socket
    listen: str | None = None
    connect: str | None = None
    replay: str | None = None


@dataclass(frozen=True)
class DebugFlags:
    dump_desensitized: bool = False
    dump_composite: bool = False
    dump_raw: bool = False
    unsafe_dump_raw: bool = False


@dataclass(frozen=True)
class RunConfig:
    scene: str | None = None
    mode: str = "oracle"
    seed: int = 0
    out_dir: str = "out"
    camera_id: int = 0
    fps: float = 30.0
    edge: EdgeParams = field(default_factory=EdgeParams)
    classifier: ClassifierParams = field(default_factory=ClassifierParams)
    reorder: ReorderParams = field(default_factory=ReorderParams)
    transport: TransportConfig = field(default_factory=TransportConfig)
    debug: DebugFlags = field(default_factory=DebugFlags)


def _make(cls, payload: dict, where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(payload) - names
    if unknown:
        raise ConfigurationError(f"unknown {where} keys: {sorted(unknown)}")
    try:
        return cls(**payload)
    except TypeError as exc:
        raise ConfigurationError(f"malformed {where} section: {exc}") from exc


def config_from_dict(data: dict) -> RunConfig:
    data = dict(data)
    edge_data = dict(data.pop("edge", {}) or {})
    tracker = _make(
        TrackerParams, dict(edge_data.pop("tracker", {}) or {}), "edge.tracker"
    )
    edge_data.pop("mode", None)  # mode is a top-level setting
    edge = _make(EdgeParams, {**edge_data, "tracker": tracker}, "edge")
    sections = {
        "edge": edge,
        "classifier": _make(
            ClassifierParams, dict(data.pop("classifier", {}) or {}), "classifier"
        ),
        "reorder": _make(ReorderParams, dict(data.pop("reorder", {}) or {}), "reorder"),
        "transport": _make(
            TransportConfig, dict(data.pop("transport", {}) or {}), "transport"
        ),
        "debug": _make(DebugFlags, dict(data.pop("debug", {}) or {}), "debug"),
    }
    config = _make(RunConfig, {**data, **sections}, "config")
    validate_config(config)
    return config


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def validate_config(config: RunConfig) -> None:
    if config.mode not in ("oracle", "heuristic"):
        raise ConfigurationError(f"mode must be oracle or heuristic, got '{config.mode}'")
    if config.scene is not None and not Path(config.scene).exists():
        raise ConfigurationError(f"scene file '{config.scene}' does not exist")
    if not 0.0 < config.edge.background_alpha <= 1.0:
        raise ConfigurationError("edge.background_alpha must be in (0, 1]")
    if not 0.0 <= config.edge.tracker.iou_threshold <= 1.0:
        raise ConfigurationError("tracker.iou_threshold must be in [0, 1]")
    if config.edge.tracker.miss_timeout < 0:
        raise ConfigurationError("tracker.miss_timeout must be >= 0")
    if not 0.0 <= config.edge.tracker.velocity_alpha <= 1.0:
        raise ConfigurationError("tracker.velocity_alpha must be in [0, 1]")
    if config.edge.noise_sigma < 0.0:
        raise ConfigurationError("edge.noise_sigma must be >= 0")
    if config.edge.detect_threshold < 1:
        raise ConfigurationError("edge.detect_threshold must be >= 1")
    if config.edge.heuristic_warmup < 0:
        raise ConfigurationError("edge.heuristic_warmup must be >= 0")
    if config.fps <= 0:
        raise ConfigurationError("fps must be positive")
    if config.reorder.capacity < 1 or config.reorder.gap_frames < 1:
        raise ConfigurationError("reorder.capacity and gap_frames must be >= 1")
    if config.reorder.gap_seconds <= 0:
        raise ConfigurationError("reorder.gap_seconds must be positive")
    if config.transport.kind not in ("in-process", "file", "socket"):
        raise ConfigurationError(f"unknown transport kind '{config.transport.kind}'")
    if config.debug.dump_raw and not config.debug.unsafe_dump_raw:
        raise ConfigurationError(
            "raw-frame dumps are refused without the explicit unsafe_dump_raw flag"
        )
    for name in (
        "fall_vy_frac",
        "fallen_spine_deg",
        "fallen_aspect",
        "sit_gap_frac",
        "sit_spine_deg",
        "walk_speed_frac",
        "stand_spine_deg",
    ):
        if getattr(config.classifier, name) <= 0:
            raise ConfigurationError(f"classifier.{name} must be positive")
