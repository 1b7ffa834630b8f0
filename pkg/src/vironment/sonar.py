"""Echo physics for one HC-SR04-class rangefinder against a 2-D scene.

Agents are vertical cylinders seen as circles from above.  A sensor at
the wearer's position looks along a bearing with a conical beam; the
first echo is the shortest distance to any agent surface reachable by a
ray inside the cone, subject to the transducer's dead zone (below
min_range nothing is reported) and max_range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import WearerPose, to_egocentric, wrap180


@dataclass(frozen=True)
class SonarSpec:
    """Rangefinder characteristics. Defaults model the 2 cm - 4 m class."""

    min_range: float = 0.02
    max_range: float = 4.0
    beam_half_angle_deg: float = 15.0
    speed_of_sound: float = 343.0

    def __post_init__(self):
        if not 0 < self.min_range < self.max_range:
            raise ValueError(
                f"require 0 < min_range < max_range, got {self.min_range}, {self.max_range}"
            )
        if not 0 < self.beam_half_angle_deg <= 45:
            raise ValueError(
                f"beam_half_angle_deg must be in (0, 45], got {self.beam_half_angle_deg}"
            )
        if self.speed_of_sound <= 0:
            raise ValueError(f"speed_of_sound must be > 0, got {self.speed_of_sound}")


@dataclass(frozen=True)
class Agent:
    """A person-sized cylinder moving at constant velocity."""

    id: str
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    radius: float = 0.25

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"agent {self.id!r} position must be finite")
        if self.radius <= 0:
            raise ValueError(f"agent {self.id!r} radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class Scene:
    """Wearer plus agents, everything in the world frame."""

    wearer: WearerPose = WearerPose()
    agents: tuple[Agent, ...] = ()
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate agent ids: {dupes}")


@dataclass(frozen=True)
class NoiseModel:
    """Additive Gaussian range noise plus a per-reading dropout probability."""

    stddev: float = 0.0
    dropout_prob: float = 0.0

    def __post_init__(self):
        if self.stddev < 0:
            raise ValueError(f"stddev must be >= 0, got {self.stddev}")
        if not 0 <= self.dropout_prob <= 1:
            raise ValueError(f"dropout_prob must be in [0, 1], got {self.dropout_prob}")


def echo_time(distance: float, spec: SonarSpec) -> float:
    """Round-trip time of flight for a target at the given distance."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    return 2.0 * distance / spec.speed_of_sound


def distance_from_time(t: float, spec: SonarSpec) -> float:
    """Inverse of echo_time: distance = t * c / 2."""
    return t * spec.speed_of_sound / 2.0


def _surface_distance_in_cone(
    center_range: float, center_off_deg: float, radius: float, half_angle_deg: float
) -> float | None:
    """Shortest hit distance from the origin to a circle, over rays in a cone.

    center_off_deg is the circle center's angular offset from the cone
    axis, already wrapped to [-180, 180).  Returns None when no ray in
    the cone intersects the circle.
    """
    d = center_range
    r = radius
    off = abs(center_off_deg)
    if d > r:
        # Hit distance grows monotonically with ray angle away from the
        # center line, so the best in-cone ray is the closest one.  From
        # outside the circle only forward-pointing rays (< 90 degrees
        # off the center line) can hit at all.
        phi = math.radians(max(0.0, off - half_angle_deg))
        s = d * math.sin(phi)
        if s > r or phi >= math.pi / 2:
            return None
        return d * math.cos(phi) - math.sqrt(r * r - s * s)
    # Origin inside the circle: every ray exits, nearest exit at the
    # largest in-cone angle away from the center direction.
    phi = math.radians(min(180.0, off + half_angle_deg))
    s = d * math.sin(phi)
    return d * math.cos(phi) + math.sqrt(r * r - s * s)


def first_echo(scene: Scene, sensor_bearing_deg: float, spec: SonarSpec) -> float | None:
    """First-echo distance for a sensor looking along the given bearing.

    Bearing is egocentric (clockwise from the wearer's forward).  Returns
    None when nothing inside the beam cone reflects within max_range, or
    when the nearest surface sits inside the dead zone below min_range.
    """
    best = None
    for agent in scene.agents:
        tgt = to_egocentric(scene.wearer, (agent.x, agent.y))
        off = wrap180(tgt.bearing_deg - sensor_bearing_deg)
        dist = _surface_distance_in_cone(
            tgt.range_m, off, agent.radius, spec.beam_half_angle_deg
        )
        if dist is not None and (best is None or dist < best):
            best = dist
    if best is None or best > spec.max_range or best < spec.min_range:
        return None
    return best


def apply_noise(
    distance: float | None,
    noise: NoiseModel,
    rng: np.random.Generator,
    spec: SonarSpec = SonarSpec(),
) -> float | None:
    """Corrupt one reading: dropout with fixed probability, then Gaussian jitter.

    Noisy values are clamped to [min_range, max_range].  Empty readings
    stay empty and consume no random draws, so identical seeds replay
    identical readings for identical scenes.
    """
    if distance is None:
        return None
    if rng.random() < noise.dropout_prob:
        return None
    noisy = distance + noise.stddev * rng.standard_normal()
    return min(max(noisy, spec.min_range), spec.max_range)


def step_scene(scene: Scene, dt: float) -> Scene:
    """Advance every agent by velocity * dt. The wearer only moves on command."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    moved = tuple(
        replace(a, x=a.x + a.vx * dt, y=a.y + a.vy * dt) for a in scene.agents
    )
    return replace(scene, agents=moved)
