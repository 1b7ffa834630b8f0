"""Deterministic session loop: step the scene, scan, display, alert, record.

One cycle per scan revolution.  External commands (move or add agents,
move the wearer) are queued and applied only at cycle boundaries, in
timestamp order with ties broken by arrival order, which keeps a
session a pure function of (scene, config, command script).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .alert import AlertConfig, AlertState, step_alert
from .distancer import Calibration, project_scene, step_distancer
from .geometry import WearerPose
from .ppi import PpiFrame, build_ppi
from .scanner import ScanFrame, ScanSchedule, default_schedule, run_scan
from .sonar import Agent, NoiseModel, Scene, SonarSpec, step_scene

COMMAND_KINDS = ("move-agent", "add-agent", "remove-agent", "move-wearer")


@dataclass(frozen=True)
class Command:
    """A scripted or live steering command, applied at a cycle boundary."""

    t_ms: int
    kind: str
    args: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SessionConfig:
    spec: SonarSpec = SonarSpec()
    noise: NoiseModel = NoiseModel()
    alert: AlertConfig = AlertConfig()
    schedule: ScanSchedule | None = None  # None -> default clock-order timing
    duration_s: float | None = None  # None -> unbounded (serve only)
    seed: int | None = None  # None -> fall back to Scene.rng_seed

    def resolved_schedule(self) -> ScanSchedule:
        return self.schedule if self.schedule is not None else default_schedule(self.spec)


@dataclass(frozen=True)
class TelemetryRecord:
    timestamp_ms: int
    frame: ScanFrame
    ppi: PpiFrame
    alert_led: bool
    alert_horn: bool
    wearer: WearerPose
    agents: tuple[Agent, ...]
    distancer: str  # forward-camera traffic light, "green"/"yellow"/"red"

    def to_dict(self) -> dict:
        return {
            "seq": self.frame.seq,
            "t_ms": self.timestamp_ms,
            "readings": list(self.frame.readings),
            "ppi": {
                "seq": self.ppi.seq,
                "sectors": [
                    {"dodecant": s.dodecant, "radius": s.radius_fraction, "green": s.green}
                    for s in self.ppi.sectors
                ],
            },
            "alert": {"led": self.alert_led, "horn": self.alert_horn},
            "wearer": {
                "x": self.wearer.x,
                "y": self.wearer.y,
                "heading": self.wearer.heading_deg,
            },
            "agents": [
                {"id": a.id, "x": a.x, "y": a.y, "vx": a.vx, "vy": a.vy, "radius": a.radius}
                for a in self.agents
            ],
            "distancer": self.distancer,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


@dataclass(frozen=True)
class CommandError:
    t_ms: int
    command: Command
    message: str


@dataclass
class SessionResult:
    records: list[TelemetryRecord]
    command_errors: list[CommandError]

    @property
    def alert_on_cycles(self) -> int:
        return sum(1 for r in self.records if r.alert_led)

    @property
    def min_distance_m(self) -> float | None:
        best = None
        for r in self.records:
            for mm in r.frame.readings:
                if mm != 0xFFFF and (best is None or mm < best):
                    best = mm
        return None if best is None else best / 1000.0


def apply_command(scene: Scene, cmd: Command) -> Scene:
    """Apply one steering command; raises ValueError on malformed input."""
    args = cmd.args
    ids = {a.id for a in scene.agents}
    try:
        if cmd.kind == "move-agent":
            if args["id"] not in ids:
                raise ValueError(f"unknown agent id {args['id']!r}")
            agents = tuple(
                replace(
                    a,
                    x=float(args["x"]),
                    y=float(args["y"]),
                    vx=float(args.get("vx", a.vx)),
                    vy=float(args.get("vy", a.vy)),
                )
                if a.id == args["id"]
                else a
                for a in scene.agents
            )
            return replace(scene, agents=agents)
        if cmd.kind == "add-agent":
            if args["id"] in ids:
                raise ValueError(f"agent id {args['id']!r} already exists")
            new = Agent(
                id=str(args["id"]),
                x=float(args["x"]),
                y=float(args["y"]),
                vx=float(args.get("vx", 0.0)),
                vy=float(args.get("vy", 0.0)),
                radius=float(args.get("radius", 0.25)),
            )
            return replace(scene, agents=scene.agents + (new,))
        if cmd.kind == "remove-agent":
            if args["id"] not in ids:
                raise ValueError(f"unknown agent id {args['id']!r}")
            return replace(
                scene, agents=tuple(a for a in scene.agents if a.id != args["id"])
            )
        if cmd.kind == "move-wearer":
            pose = WearerPose(
                x=float(args["x"]),
                y=float(args["y"]),
                heading_deg=float(args.get("heading", scene.wearer.heading_deg)),
            )
            return replace(scene, wearer=pose)
    except KeyError as exc:
        raise ValueError(f"missing argument {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise ValueError(str(exc)) from exc
    raise ValueError(f"unknown command kind {cmd.kind!r}")


class SessionLoop:
    """Cycle-by-cycle engine shared by headless runs and the live service."""

    def __init__(self, scene: Scene, cfg: SessionConfig, commands=()):
        self.cfg = cfg
        self.schedule = cfg.resolved_schedule()
        self.cycle_s = self.schedule.cycle_duration
        self._initial_scene = scene
        self._script = sorted(
            enumerate(commands), key=lambda item: (item[1].t_ms, item[0])
        )
        self.reset()

    def reset(self) -> None:
        self.scene = self._initial_scene
        seed = self.cfg.seed if self.cfg.seed is not None else self.scene.rng_seed
        self.rng = np.random.default_rng(seed)
        self.seq = 0
        self.cycle = 0  # completed cycles
        self.alert_state = AlertState()
        self._live_queue: list[Command] = []
        self._script_pos = 0
        self.command_errors: list[CommandError] = []

    @property
    def now_ms(self) -> int:
        return round(self.cycle * self.cycle_s * 1000)

    def submit(self, cmd: Command) -> None:
        """Queue a live command for the next cycle boundary."""
        self._live_queue.append(cmd)

    def _drain_commands(self) -> None:
        boundary = self.now_ms
        due = []
        while self._script_pos < len(self._script):
            order, cmd = self._script[self._script_pos]
            if cmd.t_ms <= boundary:
                due.append((cmd.t_ms, 0, order, cmd))
                self._script_pos += 1
            else:
                break
        for order, cmd in enumerate(self._live_queue):
            due.append((min(cmd.t_ms, boundary), 1, order, cmd))
        self._live_queue.clear()
        due.sort(key=lambda item: (item[0], item[1], item[2]))
        for _, _, _, cmd in due:
            try:
                self.scene = apply_command(self.scene, cmd)
            except ValueError as exc:
                self.command_errors.append(CommandError(boundary, cmd, str(exc)))

    def step(self) -> TelemetryRecord:
        """Run one cycle and emit its telemetry record."""
        self._drain_commands()
        self.scene = step_scene(self.scene, self.cycle_s)
        self.cycle += 1
        frame = run_scan(
            self.scene,
            self.schedule,
            self.cfg.spec,
            self.cfg.noise,
            rng=self.rng,
            seq=self.seq,
            timestamp_ms=self.now_ms,
        )
        self.seq = (self.seq + 1) & 0xFFFF
        ppi = build_ppi(frame, self.cfg.spec)
        self.alert_state, outputs = step_alert(self.alert_state, frame, self.cfg.alert)
        cal = Calibration(focal_length=1000.0)
        state = step_distancer(project_scene(self.scene, cal), cal)
        return TelemetryRecord(
            timestamp_ms=frame.timestamp_ms,
            frame=frame,
            ppi=ppi,
            alert_led=outputs["led"],
            alert_horn=outputs["horn"],
            wearer=self.scene.wearer,
            agents=self.scene.agents,
            distancer=state.value,
        )


def cycle_count(cfg: SessionConfig) -> int | None:
    """Bounded record count: floor(duration / cycle_duration)."""
    if cfg.duration_s is None:
        return None
    return int(cfg.duration_s / cfg.resolved_schedule().cycle_duration)


def run_session(
    scene: Scene, cfg: SessionConfig, commands=(), cycles: int | None = None
) -> SessionResult:
    """Run a bounded session and collect every telemetry record.

    cycles overrides the config duration when given; one of the two must
    bound the run.
    """
    if cycles is None:
        cycles = cycle_count(cfg)
    if cycles is None:
        raise ValueError("unbounded session: set cfg.duration_s or pass cycles")
    loop = SessionLoop(scene, cfg, commands)
    records = [loop.step() for _ in range(cycles)]
    return SessionResult(records=records, command_errors=loop.command_errors)
