"""Multiplexer routing and the sequential 12-slot scan schedule.

The ring wires 12 sensors through four 8-channel analog multiplexers:
two banks carry the trigger lines, two carry the echo lines, with a
sensor's trigger and echo always on the same channel number.  One scan
visits every sensor exactly once, one slot at a time, so no two sensors
ever chirp together and crosstalk is impossible by construction.

Reading index i of a ScanFrame belongs to clock position 12 when i == 0
and clock position i otherwise; sensor i looks along bearing 30*i
degrees clockwise from forward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .sonar import NoiseModel, Scene, SonarSpec, apply_noise, echo_time, first_echo

SENTINEL_MM = 0xFFFF
NUM_SENSORS = 12

# Default slot margin; pads the 4 m echo timeout to a round 25 ms slot
# and therefore a 300 ms revolution (3.33 Hz).
DEFAULT_MARGIN_S = 1.676e-3


@dataclass(frozen=True)
class MuxRoute:
    """Which multiplexer bank and channel a sensor's two lines ride on."""

    trigger_mux: int
    trigger_channel: int
    echo_mux: int
    echo_channel: int

    def __post_init__(self):
        if self.trigger_mux not in (0, 1) or self.echo_mux not in (2, 3):
            raise ValueError("trigger mux must be 0/1 and echo mux 2/3")
        if not (0 <= self.trigger_channel <= 7 and 0 <= self.echo_channel <= 7):
            raise ValueError("mux channels must be in 0..7")
        if self.trigger_channel != self.echo_channel:
            raise ValueError("trigger and echo channels must match (symmetric wiring)")


def route(sensor_index: int) -> MuxRoute:
    """Mux route for a sensor: 0-7 on the first banks, 8-11 on the second."""
    if not 0 <= sensor_index <= 11:
        raise ValueError(f"sensor_index must be in 0..11, got {sensor_index}")
    if sensor_index < 8:
        return MuxRoute(0, sensor_index, 2, sensor_index)
    ch = sensor_index - 8
    return MuxRoute(1, ch, 3, ch)


@dataclass(frozen=True)
class ScanSchedule:
    """Slot timing plus the order in which sensors are visited."""

    slot_duration: float
    sensor_order: tuple[int, ...] = tuple(range(NUM_SENSORS))
    current_slot: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sensor_order", tuple(self.sensor_order))
        if sorted(self.sensor_order) != list(range(NUM_SENSORS)):
            raise ValueError("sensor_order must be a permutation of 0..11")
        if not 0 <= self.current_slot < NUM_SENSORS:
            raise ValueError(f"current_slot must be in 0..11, got {self.current_slot}")
        if self.slot_duration <= 0:
            raise ValueError(f"slot_duration must be > 0, got {self.slot_duration}")

    @property
    def cycle_duration(self) -> float:
        return NUM_SENSORS * self.slot_duration


def default_schedule(spec: SonarSpec = SonarSpec(), margin: float = DEFAULT_MARGIN_S) -> ScanSchedule:
    """Clock-order schedule sized so a slot always outlasts the echo timeout."""
    slot, _, _ = scan_timing(spec, margin)
    return ScanSchedule(slot_duration=slot)


def next_slot(schedule: ScanSchedule) -> tuple[int, ScanSchedule]:
    """Sensor for the current slot, plus the schedule advanced cyclically."""
    sensor = schedule.sensor_order[schedule.current_slot]
    advanced = replace(
        schedule, current_slot=(schedule.current_slot + 1) % NUM_SENSORS
    )
    return sensor, advanced


def scan_timing(spec: SonarSpec, margin: float = DEFAULT_MARGIN_S) -> tuple[float, float, float]:
    """(slot_duration, cycle_duration, rate_hz) for a worst-case echo plus margin."""
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    slot = echo_time(spec.max_range, spec) + margin
    cycle = NUM_SENSORS * slot
    return slot, cycle, 1.0 / cycle


@dataclass(frozen=True)
class ScanFrame:
    """One full revolution of readings in millimeters, 0xFFFF meaning no echo."""

    seq: int
    readings: tuple[int, ...]
    timestamp_ms: int = 0

    def __post_init__(self):
        object.__setattr__(self, "readings", tuple(int(r) for r in self.readings))
        if not 0 <= self.seq <= 0xFFFF:
            raise ValueError(f"seq must fit u16, got {self.seq}")
        if len(self.readings) != NUM_SENSORS:
            raise ValueError(f"expected {NUM_SENSORS} readings, got {len(self.readings)}")
        for i, r in enumerate(self.readings):
            if not 0 <= r <= 0xFFFF:
                raise ValueError(f"reading[{i}] must fit u16, got {r}")
        if not 0 <= self.timestamp_ms <= 0xFFFFFFFF:
            raise ValueError(f"timestamp_ms must fit u32, got {self.timestamp_ms}")


def sensor_bearing(sensor_index: int) -> float:
    """Boresight bearing of a sensor, degrees clockwise from forward."""
    if not 0 <= sensor_index <= 11:
        raise ValueError(f"sensor_index must be in 0..11, got {sensor_index}")
    return 30.0 * sensor_index


def run_scan(
    scene: Scene,
    schedule: ScanSchedule,
    spec: SonarSpec,
    noise: NoiseModel = NoiseModel(),
    rng: np.random.Generator | None = None,
    seq: int = 0,
    timestamp_ms: int = 0,
) -> ScanFrame:
    """One multiplexed revolution: fire each sensor once, in schedule order.

    Readings are rounded to whole millimeters; sensors that hear nothing
    get the sentinel.  With zero noise the frame is a pure function of
    the scene.
    """
    if rng is None:
        rng = np.random.default_rng(scene.rng_seed)
    readings = [SENTINEL_MM] * NUM_SENSORS
    sched = schedule
    for _ in range(NUM_SENSORS):
        sensor, sched = next_slot(sched)
        route(sensor)  # mux switch for this slot; injective, checked in tests
        dist = first_echo(scene, sensor_bearing(sensor), spec)
        dist = apply_noise(dist, noise, rng, spec)
        if dist is not None:
            readings[sensor] = int(round(dist * 1000.0))
    return ScanFrame(seq=seq & 0xFFFF, readings=tuple(readings), timestamp_ms=timestamp_ms)
