"""Egocentric clock-face geometry for the sensor ring.

The ring divides the horizontal plane into 12 equal 30-degree sectors
("dodecants") indexed by clock position: 12 points forward, 3 is a
quarter turn to the wearer's right, 6 points backward.  Bearings are
measured clockwise from the wearer's forward direction, in degrees.
World headings use the mathematical convention (counterclockwise from
the +x axis); the egocentric transform reconciles the two.

Clock numbering increases clockwise as seen from above the wearer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SECTOR_WIDTH_DEG = 30.0


def _check_finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def norm360(angle_deg: float) -> float:
    """Normalize an angle in degrees to [0, 360)."""
    folded = _check_finite(angle_deg, "angle") % 360.0
    # % can round up to exactly 360.0 for tiny negative inputs
    return 0.0 if folded >= 360.0 else folded


def wrap180(angle_deg: float) -> float:
    """Wrap an angle in degrees to [-180, 180)."""
    return norm360(angle_deg + 180.0) - 180.0


@dataclass(frozen=True)
class WearerPose:
    """Wearer position in the world frame, heading in degrees CCW from +x."""

    x: float = 0.0
    y: float = 0.0
    heading_deg: float = 0.0

    def __post_init__(self):
        _check_finite(self.x, "x")
        _check_finite(self.y, "y")
        object.__setattr__(self, "heading_deg", norm360(self.heading_deg))


@dataclass(frozen=True)
class PolarTarget:
    """A point seen from the wearer: range in meters, bearing clockwise from forward."""

    range_m: float
    bearing_deg: float

    def __post_init__(self):
        _check_finite(self.range_m, "range_m")
        _check_finite(self.bearing_deg, "bearing_deg")
        if self.range_m < 0:
            raise ValueError(f"range_m must be >= 0, got {self.range_m}")
        if not 0.0 <= self.bearing_deg < 360.0:
            raise ValueError(f"bearing_deg must be in [0, 360), got {self.bearing_deg}")


def dodecant_of(bearing_deg: float) -> int:
    """Clock position (1..12) of the 30-degree sector containing a bearing.

    Sector k is centered at 30*(k % 12) degrees clockwise from forward and
    spans the half-open interval [center-15, center+15).  Bearing 0 is
    dead ahead and falls in sector 12.
    """
    shifted = norm360(bearing_deg + SECTOR_WIDTH_DEG / 2)
    idx = int(shifted // SECTOR_WIDTH_DEG) % 12
    return 12 if idx == 0 else idx


def bearing_of(dodecant: int) -> float:
    """Center bearing of a clock position, degrees clockwise from forward."""
    if not isinstance(dodecant, int) or isinstance(dodecant, bool):
        raise ValueError(f"dodecant must be an int, got {dodecant!r}")
    if not 1 <= dodecant <= 12:
        raise ValueError(f"dodecant must be in 1..12, got {dodecant}")
    return SECTOR_WIDTH_DEG * (dodecant % 12)


def to_egocentric(pose: WearerPose, point: tuple[float, float]) -> PolarTarget:
    """World point -> (range, bearing) as seen by the wearer.

    Bearing is measured clockwise from the wearer's heading.  A point
    coincident with the wearer maps to range 0, bearing 0 by convention.
    """
    px = _check_finite(point[0], "point x")
    py = _check_finite(point[1], "point y")
    dx = px - pose.x
    dy = py - pose.y
    rng = math.hypot(dx, dy)
    if rng == 0.0:
        return PolarTarget(0.0, 0.0)
    world_deg = math.degrees(math.atan2(dy, dx))
    return PolarTarget(rng, norm360(pose.heading_deg - world_deg))
