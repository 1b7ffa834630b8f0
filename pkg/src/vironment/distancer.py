"""Monocular distance estimation from person bounding boxes.

A pinhole camera maps a person of known height H at distance d to a box
of pixel height h = f * H / d, so d = f * H / h with the focal length f
in pixels and an average-person height prior.  The screen shows green /
yellow / red as the nearest person is comfortably far / between 6 and
7 feet / closer than 6 feet.

Detections arrive as data (one JSON record per camera frame); running
the detector network itself is out of scope.  For end-to-end tests a
synthetic projector turns simulator scenes into detections.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .sonar import Scene

FEET = 0.3048
# Band edges as exact literals so the stated boundary values compare equal
# (6 ft and 7 ft; 6 * 0.3048 in floats lands a hair above 1.8288).
RED_BELOW_M = 1.8288
YELLOW_BELOW_M = 2.1336

PERSON_LABEL = "person"
DEFAULT_MIN_CONFIDENCE = 0.5


@dataclass(frozen=True)
class Detection:
    """Image-space bounding box; pixel origin at the top-left corner."""

    bbox_top: float
    bbox_bottom: float
    bbox_left: float
    bbox_right: float
    confidence: float
    class_label: str = PERSON_LABEL

    def __post_init__(self):
        if self.bbox_bottom <= self.bbox_top:
            raise ValueError(
                f"bbox_bottom ({self.bbox_bottom}) must exceed bbox_top ({self.bbox_top})"
            )
        if self.bbox_right <= self.bbox_left:
            raise ValueError(
                f"bbox_right ({self.bbox_right}) must exceed bbox_left ({self.bbox_left})"
            )
        if not 0 <= self.confidence <= 1:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")

    @property
    def height_px(self) -> float:
        return self.bbox_bottom - self.bbox_top


@dataclass(frozen=True)
class Calibration:
    focal_length: float  # pixels
    person_height: float = 1.65  # meters, average-person prior

    def __post_init__(self):
        if self.focal_length <= 0:
            raise ValueError(f"focal_length must be > 0, got {self.focal_length}")
        if self.person_height <= 0:
            raise ValueError(f"person_height must be > 0, got {self.person_height}")


class ScreenState(Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"


def estimate_distance(det: Detection, cal: Calibration) -> float:
    """Pinhole estimate d = focal * person_height / box_height."""
    h = det.height_px
    if h <= 0 or not math.isfinite(h):
        raise ValueError(f"box height must be positive and finite, got {h}")
    return cal.focal_length * cal.person_height / h


def screen_state(distance: float) -> ScreenState:
    """Red below 6 ft, yellow in [6 ft, 7 ft), green at 7 ft and beyond."""
    if distance <= 0 or not math.isfinite(distance):
        raise ValueError(f"distance must be positive and finite, got {distance}")
    if distance < RED_BELOW_M:
        return ScreenState.RED
    if distance < YELLOW_BELOW_M:
        return ScreenState.YELLOW
    return ScreenState.GREEN


def step_distancer(
    detections,
    cal: Calibration,
    prev: ScreenState = ScreenState.GREEN,
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
) -> ScreenState:
    """Screen state for one camera frame: the nearest qualifying person governs.

    Only person-class detections at or above min_confidence count; with
    none in frame the screen is green.  prev is accepted for interface
    stability but the mapping is memoryless.
    """
    del prev
    distances = [
        estimate_distance(d, cal)
        for d in detections
        if d.class_label == PERSON_LABEL and d.confidence >= min_confidence
    ]
    if not distances:
        return ScreenState.GREEN
    return screen_state(min(distances))


def parse_detection_log(lines) -> list[list[Detection]]:
    """Parse a line-delimited detection log: one JSON record per camera frame.

    Each line holds {"detections": [{bbox_top, bbox_bottom, bbox_left,
    bbox_right, confidence, class_label}, ...]}.
    """
    frames = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            frames.append(
                [Detection(**entry) for entry in record["detections"]]
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"detection log line {lineno}: {exc}") from exc
    return frames


def project_scene(
    scene: Scene,
    cal: Calibration,
    fov_half_angle_deg: float = 30.0,
    image_width: int = 1280,
    image_height: int = 720,
) -> list[Detection]:
    """Synthetic forward camera: project agents into person detections.

    The camera looks along the wearer's heading.  Box height follows the
    same pinhole law the estimator inverts, so estimate_distance exactly
    recovers the agent's center distance.  Agents outside the horizontal
    field of view are not seen.
    """
    from .geometry import to_egocentric, wrap180

    cx, cy = image_width / 2.0, image_height / 2.0
    detections = []
    for agent in scene.agents:
        tgt = to_egocentric(scene.wearer, (agent.x, agent.y))
        off = wrap180(tgt.bearing_deg)
        if abs(off) > fov_half_angle_deg or tgt.range_m <= 0:
            continue
        h = cal.focal_length * cal.person_height / tgt.range_m
        w = cal.focal_length * (2 * agent.radius) / tgt.range_m
        u = cx + cal.focal_length * math.tan(math.radians(off))
        detections.append(
            Detection(
                bbox_top=cy - h / 2,
                bbox_bottom=cy + h / 2,
                bbox_left=u - w / 2,
                bbox_right=u + w / 2,
                confidence=1.0,
                class_label=PERSON_LABEL,
            )
        )
    return detections
