"""Scenario files: JSON documents describing a scene, config, and script.

Validation is strict: unknown fields are rejected with the offending
path named, so a typo in an override never silently falls back to a
default.
"""

from __future__ import annotations

import json
from pathlib import Path

from .alert import AlertConfig
from .geometry import WearerPose
from .scanner import ScanSchedule, scan_timing, DEFAULT_MARGIN_S
from .session import COMMAND_KINDS, Command, SessionConfig
from .sonar import Agent, NoiseModel, Scene, SonarSpec


class ScenarioError(Exception):
    """A scenario file failed to parse or validate."""


def _require_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{path}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}: unknown field")
    for key in required:
        if key not in obj:
            raise ScenarioError(f"{path}.{key}: missing required field")


def _number(obj: dict, key: str, path: str, default=None) -> float:
    if key not in obj:
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _load_wearer(doc: dict) -> WearerPose:
    _require_keys(doc, {"x", "y", "heading"}, {"x", "y"}, "wearer")
    return WearerPose(
        x=_number(doc, "x", "wearer"),
        y=_number(doc, "y", "wearer"),
        heading_deg=_number(doc, "heading", "wearer", 0.0),
    )


def _load_agents(items, path: str) -> tuple[Agent, ...]:
    if not isinstance(items, list):
        raise ScenarioError(f"{path}: expected a list")
    agents = []
    seen = set()
    for i, entry in enumerate(items):
        p = f"{path}[{i}]"
        _require_keys(entry, {"id", "x", "y", "vx", "vy", "radius"}, {"id", "x", "y"}, p)
        agent_id = str(entry["id"])
        if agent_id in seen:
            raise ScenarioError(f"{p}.id: duplicate agent id {agent_id!r}")
        seen.add(agent_id)
        try:
            agents.append(
                Agent(
                    id=agent_id,
                    x=_number(entry, "x", p),
                    y=_number(entry, "y", p),
                    vx=_number(entry, "vx", p, 0.0),
                    vy=_number(entry, "vy", p, 0.0),
                    radius=_number(entry, "radius", p, 0.25),
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{p}: {exc}") from exc
    return tuple(agents)


def _load_script(items, path: str) -> tuple[Command, ...]:
    if not isinstance(items, list):
        raise ScenarioError(f"{path}: expected a list")
    commands = []
    for i, entry in enumerate(items):
        p = f"{path}[{i}]"
        _require_keys(entry, {"t_ms", "command", "args"}, {"t_ms", "command"}, p)
        kind = entry["command"]
        if kind not in COMMAND_KINDS:
            raise ScenarioError(f"{p}.command: unknown command {kind!r}")
        t_ms = entry["t_ms"]
        if isinstance(t_ms, bool) or not isinstance(t_ms, int) or t_ms < 0:
            raise ScenarioError(f"{p}.t_ms: expected a non-negative integer")
        args = entry.get("args", {})
        if not isinstance(args, dict):
            raise ScenarioError(f"{p}.args: expected an object")
        commands.append(Command(t_ms=t_ms, kind=kind, args=args))
    return tuple(commands)


def _load_config(doc: dict) -> SessionConfig:
    _require_keys(
        doc,
        {"seed", "duration_s", "sonar", "noise", "alert", "schedule"},
        set(),
        "config",
    )
    try:
        spec = SonarSpec()
        if "sonar" in doc:
            p = "config.sonar"
            _require_keys(
                doc["sonar"],
                {"min_range", "max_range", "beam_half_angle_deg", "speed_of_sound"},
                set(),
                p,
            )
            spec = SonarSpec(
                min_range=_number(doc["sonar"], "min_range", p, 0.02),
                max_range=_number(doc["sonar"], "max_range", p, 4.0),
                beam_half_angle_deg=_number(doc["sonar"], "beam_half_angle_deg", p, 15.0),
                speed_of_sound=_number(doc["sonar"], "speed_of_sound", p, 343.0),
            )
        noise = NoiseModel()
        if "noise" in doc:
            p = "config.noise"
            _require_keys(doc["noise"], {"stddev", "dropout_prob"}, set(), p)
            noise = NoiseModel(
                stddev=_number(doc["noise"], "stddev", p, 0.0),
                dropout_prob=_number(doc["noise"], "dropout_prob", p, 0.0),
            )
        alert = AlertConfig()
        if "alert" in doc:
            p = "config.alert"
            _require_keys(
                doc["alert"],
                {"threshold", "trigger_count", "release_count", "release_threshold"},
                set(),
                p,
            )
            alert = AlertConfig(
                threshold=_number(doc["alert"], "threshold", p, 2.0),
                trigger_count=int(_number(doc["alert"], "trigger_count", p, 2)),
                release_count=int(_number(doc["alert"], "release_count", p, 3)),
                release_threshold=_number(doc["alert"], "release_threshold", p, 2.2),
            )
        schedule = None
        if "schedule" in doc:
            p = "config.schedule"
            _require_keys(doc["schedule"], {"margin_s", "sensor_order"}, set(), p)
            margin = _number(doc["schedule"], "margin_s", p, DEFAULT_MARGIN_S)
            slot, _, _ = scan_timing(spec, margin)
            order = doc["schedule"].get("sensor_order", list(range(12)))
            if not isinstance(order, list):
                raise ScenarioError(f"{p}.sensor_order: expected a list")
            schedule = ScanSchedule(slot_duration=slot, sensor_order=tuple(order))
        seed = doc.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise ScenarioError("config.seed: expected an integer")
        return SessionConfig(
            spec=spec,
            noise=noise,
            alert=alert,
            schedule=schedule,
            duration_s=_number(doc, "duration_s", "config"),
            seed=seed,
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"config: {exc}") from exc


def load_scenario(path) -> tuple[Scene, SessionConfig, tuple[Command, ...]]:
    """Load and validate a scenario file into domain objects."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    _require_keys(doc, {"wearer", "agents", "script", "config"}, {"wearer"}, "scenario")
    wearer = _load_wearer(doc["wearer"])
    agents = _load_agents(doc.get("agents", []), "agents")
    script = _load_script(doc.get("script", []), "script")
    cfg = _load_config(doc.get("config", {}))
    seed = cfg.seed if cfg.seed is not None else 0
    scene = Scene(wearer=wearer, agents=agents, rng_seed=seed)
    return scene, cfg, script


def save_scenario(path, scene: Scene, cfg: SessionConfig, script=()) -> None:
    """Write a scenario document that round-trips through load_scenario."""
    schedule = cfg.resolved_schedule()
    margin_s = schedule.slot_duration - scan_timing(cfg.spec, 0.0)[0]
    doc = {
        "wearer": {
            "x": scene.wearer.x,
            "y": scene.wearer.y,
            "heading": scene.wearer.heading_deg,
        },
        "agents": [
            {"id": a.id, "x": a.x, "y": a.y, "vx": a.vx, "vy": a.vy, "radius": a.radius}
            for a in scene.agents
        ],
        "script": [
            {"t_ms": c.t_ms, "command": c.kind, "args": c.args} for c in script
        ],
        "config": {
            "seed": cfg.seed if cfg.seed is not None else scene.rng_seed,
            "duration_s": cfg.duration_s,
            "sonar": {
                "min_range": cfg.spec.min_range,
                "max_range": cfg.spec.max_range,
                "beam_half_angle_deg": cfg.spec.beam_half_angle_deg,
                "speed_of_sound": cfg.spec.speed_of_sound,
            },
            "noise": {"stddev": cfg.noise.stddev, "dropout_prob": cfg.noise.dropout_prob},
            "alert": {
                "threshold": cfg.alert.threshold,
                "trigger_count": cfg.alert.trigger_count,
                "release_count": cfg.alert.release_count,
                "release_threshold": cfg.alert.release_threshold,
            },
            "schedule": {
                "margin_s": margin_s,
                "sensor_order": list(schedule.sensor_order),
            },
        },
    }
    if doc["config"]["duration_s"] is None:
        del doc["config"]["duration_s"]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
