"""Plan position indicator: the top-down 12-sector view of the social bubble.

Each clock-position sector encodes the nearest neighbor in that
direction twice over: the sector's boundary radius shrinks as the
neighbor approaches, and its green brightness rises from black at (or
beyond) max range to full green at the minimum range.  The distance to
green mapping is linear so it can be inverted exactly in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scanner import NUM_SENSORS, SENTINEL_MM, ScanFrame
from .sonar import SonarSpec


@dataclass(frozen=True)
class PpiSector:
    """One 30-degree wedge: outer radius as a fraction of full scale, plus color."""

    dodecant: int
    radius_fraction: float
    green: int

    def __post_init__(self):
        if not 1 <= self.dodecant <= 12:
            raise ValueError(f"dodecant must be in 1..12, got {self.dodecant}")
        if not 0.0 <= self.radius_fraction <= 1.0:
            raise ValueError(f"radius_fraction must be in [0, 1], got {self.radius_fraction}")
        if not 0 <= self.green <= 255:
            raise ValueError(f"green must be in 0..255, got {self.green}")


@dataclass(frozen=True)
class PpiFrame:
    """A full display frame: exactly one sector per clock position."""

    seq: int
    sectors: tuple[PpiSector, ...]

    def __post_init__(self):
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if sorted(s.dodecant for s in self.sectors) != list(range(1, 13)):
            raise ValueError("need exactly one sector per dodecant 1..12")


def color_of(distance: float | None, spec: SonarSpec = SonarSpec()) -> int:
    """Green intensity for a distance: 255 at min range, 0 at max range or no echo."""
    if distance is None:
        return 0
    d = min(max(distance, spec.min_range), spec.max_range)
    return int(round(255.0 * (spec.max_range - d) / (spec.max_range - spec.min_range)))


def build_ppi(frame: ScanFrame, spec: SonarSpec = SonarSpec()) -> PpiFrame:
    """Turn raw millimeter readings into display sectors.

    Reading index 0 is the 12 o'clock sector, then clockwise.  Sentinel
    readings paint a full-radius black sector (nothing in sight).
    """
    sectors = []
    for i, mm in enumerate(frame.readings):
        dodecant = 12 if i == 0 else i
        if mm == SENTINEL_MM:
            sectors.append(PpiSector(dodecant, 1.0, 0))
        else:
            d = mm / 1000.0
            fraction = min(d / spec.max_range, 1.0)
            sectors.append(PpiSector(dodecant, fraction, color_of(d, spec)))
    return PpiFrame(seq=frame.seq, sectors=tuple(sectors))


def _rim_point(cx: float, cy: float, radius: float, bearing_deg: float) -> tuple[float, float]:
    # 12 o'clock points up; bearings grow clockwise, matching screen y-down.
    rad = math.radians(bearing_deg)
    return cx + radius * math.sin(rad), cy - radius * math.cos(rad)


def render_svg(ppi: PpiFrame, size_px: int = 512) -> str:
    """Render a frame as deterministic SVG text.

    Sectors are center-apex pie slices spanning their 30-degree arc,
    with arc radius radius_fraction * size/2 and fill rgb(0, green, 0);
    clock numerals sit just inside the rim.  Identical frames render to
    byte-identical text.
    """
    if size_px < 64:
        raise ValueError(f"size_px must be >= 64, got {size_px}")
    c = size_px / 2.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size_px}" height="{size_px}" '
        f'viewBox="0 0 {size_px} {size_px}">',
        f'<rect width="{size_px}" height="{size_px}" fill="#101010"/>',
        f'<circle cx="{c:.2f}" cy="{c:.2f}" r="{c:.2f}" fill="none" stroke="#2e2e2e" stroke-width="1"/>',
    ]
    for sector in ppi.sectors:
        center = 30.0 * (sector.dodecant % 12)
        radius = sector.radius_fraction * c
        x1, y1 = _rim_point(c, c, radius, center - 15.0)
        x2, y2 = _rim_point(c, c, radius, center + 15.0)
        parts.append(
            f'<path d="M {c:.2f} {c:.2f} L {x1:.2f} {y1:.2f} '
            f'A {radius:.2f} {radius:.2f} 0 0 1 {x2:.2f} {y2:.2f} Z" '
            f'fill="rgb(0,{sector.green},0)"/>'
        )
    text_r = 0.46 * size_px
    font = max(8, size_px // 20)
    for numeral in range(1, 13):
        tx, ty = _rim_point(c, c, text_r, 30.0 * (numeral % 12))
        parts.append(
            f'<text x="{tx:.2f}" y="{ty:.2f}" fill="#9a9a9a" font-size="{font}" '
            f'font-family="monospace" text-anchor="middle" dominant-baseline="middle">'
            f"{numeral}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
