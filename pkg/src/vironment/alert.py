"""Debounced LED/horn alarm for violations of the social radius.

A bare threshold would chatter when someone hovers right at 2 m, so the
machine adds debounce counts in both directions and a release threshold
slightly above the trigger threshold.  The LED and the horn are wired
to the same logical output and can never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scanner import SENTINEL_MM, ScanFrame


@dataclass(frozen=True)
class AlertConfig:
    threshold: float = 2.0
    trigger_count: int = 2
    release_count: int = 3
    release_threshold: float = 2.2

    def __post_init__(self):
        if self.release_threshold < self.threshold:
            raise ValueError(
                f"release_threshold {self.release_threshold} must be >= threshold {self.threshold}"
            )
        if self.trigger_count < 1 or self.release_count < 1:
            raise ValueError("trigger_count and release_count must be >= 1")
        if self.threshold <= 0:
            raise ValueError(f"threshold must be > 0, got {self.threshold}")


@dataclass(frozen=True)
class AlertState:
    led_on: bool = False
    horn_on: bool = False
    violate_streak: int = 0
    clear_streak: int = 0

    def __post_init__(self):
        if self.led_on != self.horn_on:
            raise ValueError("led and horn are coupled and must match")
        if self.violate_streak < 0 or self.clear_streak < 0:
            raise ValueError("streak counters must be non-negative")


def _frame_violates(frame: ScanFrame, threshold: float) -> bool:
    # Sentinel means nothing heard, never a nearby person.
    return any(
        mm != SENTINEL_MM and mm / 1000.0 < threshold for mm in frame.readings
    )


def _frame_clear(frame: ScanFrame, release_threshold: float) -> bool:
    return all(
        mm == SENTINEL_MM or mm / 1000.0 >= release_threshold for mm in frame.readings
    )


def step_alert(
    state: AlertState, frame: ScanFrame, cfg: AlertConfig = AlertConfig()
) -> tuple[AlertState, dict[str, bool]]:
    """Advance the alarm by one frame; outputs change only at frame boundaries.

    Off -> on after trigger_count consecutive frames with any reading
    below threshold.  On -> off after release_count consecutive frames
    whose every non-sentinel reading is at or above release_threshold;
    a single closer frame resets the release streak.
    """
    if state.led_on:
        if _frame_clear(frame, cfg.release_threshold):
            clear = state.clear_streak + 1
            if clear >= cfg.release_count:
                new = AlertState(False, False, 0, 0)
            else:
                new = AlertState(True, True, 0, clear)
        else:
            new = AlertState(True, True, 0, 0)
    else:
        if _frame_violates(frame, cfg.threshold):
            violate = state.violate_streak + 1
            if violate >= cfg.trigger_count:
                new = AlertState(True, True, 0, 0)
            else:
                new = AlertState(False, False, violate, 0)
        else:
            new = AlertState(False, False, 0, 0)
    return new, {"led": new.led_on, "horn": new.horn_on}
