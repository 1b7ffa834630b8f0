"""Shared test oracles, independent of the implementations they check."""

from __future__ import annotations

import numpy as np

from vironment import SENTINEL_MM, ScanFrame


def frame_of(readings_m, seq=0, t_ms=0) -> ScanFrame:
    """Build a frame from per-sensor distances in meters (None = no echo)."""
    readings = [
        SENTINEL_MM if r is None else int(round(r * 1000)) for r in readings_m
    ]
    return ScanFrame(seq=seq, readings=readings, timestamp_ms=t_ms)


def uniform_frame(distance_m, seq=0) -> ScanFrame:
    return frame_of([distance_m] * 12, seq=seq)


def raycast_first_echo(scene, bearing_deg, spec, n_rays=10_001):
    """Brute-force first echo: cast rays across the beam cone, keep the
    closest ray-circle intersection, then apply the same dead-zone and
    max-range rules the sensor model states."""
    pose = scene.wearer
    half = spec.beam_half_angle_deg
    bearings = np.linspace(bearing_deg - half, bearing_deg + half, n_rays)
    ang = np.radians(pose.heading_deg - bearings)  # world angle, CCW
    ux, uy = np.cos(ang), np.sin(ang)
    best = np.full(n_rays, np.inf)
    for agent in scene.agents:
        dx, dy = agent.x - pose.x, agent.y - pose.y
        b = ux * dx + uy * dy
        c = dx * dx + dy * dy - agent.radius**2
        disc = b * b - c
        hit = disc >= 0
        root = np.sqrt(np.where(hit, disc, 0.0))
        near, far = b - root, b + root
        t = np.where(near >= 0, near, np.where(far >= 0, far, np.inf))
        best = np.minimum(best, np.where(hit, t, np.inf))
    m = float(best.min())
    if not np.isfinite(m) or m > spec.max_range or m < spec.min_range:
        return None
    return m


def alert_reference(frame_readings_m, cfg):
    """Direct transcription of the alarm rules, one output per frame.

    frame_readings_m: iterable of 12-element reading lists in meters,
    None for sentinel.  Returns the led/horn level after each frame.
    """
    on = False
    violate = clear = 0
    levels = []
    for readings in frame_readings_m:
        if on:
            if all(r is None or r >= cfg.release_threshold for r in readings):
                clear += 1
            else:
                clear = 0
            if clear >= cfg.release_count:
                on = False
                violate = clear = 0
        else:
            if any(r is not None and r < cfg.threshold for r in readings):
                violate += 1
            else:
                violate = 0
            if violate >= cfg.trigger_count:
                on = True
                violate = clear = 0
        levels.append(on)
    return levels


def crc16_reference(data: bytes) -> int:
    """Bit-at-a-time CRC-16/CCITT-FALSE, structured differently from the
    table-driven implementation it cross-checks."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def random_scene(rng, max_agents=5):
    """A random desk-scale scene that keeps agents clear of the wearer."""
    from vironment import Agent, Scene, WearerPose

    pose = WearerPose(
        x=float(rng.uniform(-5, 5)),
        y=float(rng.uniform(-5, 5)),
        heading_deg=float(rng.uniform(0, 360)),
    )
    agents = []
    for i in range(int(rng.integers(0, max_agents + 1))):
        radius = float(rng.uniform(0.1, 0.45))
        distance = float(rng.uniform(radius + 0.15, 6.0))
        angle = rng.uniform(0, 2 * np.pi)
        agents.append(
            Agent(
                id=f"a{i}",
                x=pose.x + distance * float(np.cos(angle)),
                y=pose.y + distance * float(np.sin(angle)),
                vx=float(rng.uniform(-1, 1)),
                vy=float(rng.uniform(-1, 1)),
                radius=radius,
            )
        )
    return Scene(wearer=pose, agents=tuple(agents), rng_seed=int(rng.integers(2**31)))
