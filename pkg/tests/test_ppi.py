from fractions import Fraction

import numpy as np
import pytest

from vironment import (
    PpiFrame,
    PpiSector,
    SENTINEL_MM,
    SonarSpec,
    build_ppi,
    color_of,
    render_svg,
)
from helpers import frame_of


@pytest.fixture
def spec():
    return SonarSpec()


def linear_green(distance, spec):
    # Independent exact-rational evaluation of the stated linear law.
    d = Fraction(str(distance))
    lo, hi = Fraction(str(spec.min_range)), Fraction(str(spec.max_range))
    d = min(max(d, lo), hi)
    return round(255 * (hi - d) / (hi - lo))


class TestColorOf:
    def test_no_echo_is_black(self, spec):
        assert color_of(None, spec) == 0

    def test_min_range_is_full_green(self, spec):
        assert color_of(0.02, spec) == 255

    def test_max_range_is_black(self, spec):
        assert color_of(4.0, spec) == 0

    def test_midpoint(self, spec):
        assert linear_green(2.01, spec) == 128
        assert color_of(2.01, spec) == 128

    def test_one_meter(self, spec):
        assert linear_green(1.0, spec) == 192
        assert color_of(1.0, spec) == 192

    def test_matches_rational_oracle_across_span(self, spec):
        for mm in range(20, 4001, 7):
            d = mm / 1000.0
            assert color_of(d, spec) == linear_green(Fraction(mm, 1000), spec)

    def test_out_of_span_clamped(self, spec):
        assert color_of(0.001, spec) == 255
        assert color_of(9.0, spec) == 0

    def test_monotone_non_increasing(self, spec):
        distances = np.linspace(0.02, 4.0, 2000)
        greens = [color_of(float(d), spec) for d in distances]
        assert all(a >= b for a, b in zip(greens, greens[1:]))


class TestBuildPpi:
    def test_all_sentinel_frame(self, spec):
        ppi = build_ppi(frame_of([None] * 12), spec)
        assert len(ppi.sectors) == 12
        for sector in ppi.sectors:
            assert sector.radius_fraction == 1.0
            assert sector.green == 0

    def test_two_meters_ahead_is_half_radius(self, spec):
        ppi = build_ppi(frame_of([2.0] + [None] * 11), spec)
        twelve = next(s for s in ppi.sectors if s.dodecant == 12)
        assert twelve.radius_fraction == pytest.approx(0.5)

    def test_one_meter_behind(self, spec):
        ppi = build_ppi(frame_of([None] * 6 + [1.0] + [None] * 5), spec)
        six = next(s for s in ppi.sectors if s.dodecant == 6)
        assert six.radius_fraction == pytest.approx(0.25)
        assert six.green == 192

    def test_one_sector_per_dodecant(self, spec):
        rng = np.random.default_rng(3)
        for _ in range(50):
            readings = [
                None if rng.random() < 0.3 else float(rng.uniform(0.02, 4.0))
                for _ in range(12)
            ]
            ppi = build_ppi(frame_of(readings), spec)
            assert sorted(s.dodecant for s in ppi.sectors) == list(range(1, 13))

    def test_radius_inverts_to_reading(self, spec):
        rng = np.random.default_rng(4)
        for _ in range(200):
            mm = int(rng.integers(20, 4001))
            ppi = build_ppi(frame_of([mm / 1000.0] + [None] * 11), spec)
            twelve = next(s for s in ppi.sectors if s.dodecant == 12)
            recovered = twelve.radius_fraction * spec.max_range * 1000.0
            assert abs(recovered - mm) <= 0.5

    def test_seq_mirrors_scan_frame(self, spec):
        ppi = build_ppi(frame_of([None] * 12, seq=777), spec)
        assert ppi.seq == 777


class TestRenderSvg:
    def test_all_sentinel_is_black_disc(self, spec):
        svg = render_svg(build_ppi(frame_of([None] * 12), spec), 256)
        assert svg.count('fill="rgb(0,0,0)"') == 12
        assert svg.count("<path") == 12

    def test_deterministic_output(self, spec):
        frame = frame_of([2.0, None, 1.0] + [None] * 9, seq=3)
        a = render_svg(build_ppi(frame, spec), 512)
        b = render_svg(build_ppi(frame, spec), 512)
        assert a == b

    def test_ahead_sector_spans_vertical(self, spec):
        # 2 m dead ahead: the 12 o'clock wedge starts at bearing -15deg,
        # radius fraction 0.5 of the half-size, around the top center.
        size = 400
        svg = render_svg(build_ppi(frame_of([2.0] + [None] * 11), spec), size)
        radius = 0.5 * size / 2
        x1 = 200 + radius * np.sin(np.radians(-15))
        y1 = 200 - radius * np.cos(np.radians(-15))
        assert f"L {x1:.2f} {y1:.2f}" in svg

    def test_numerals_present(self, spec):
        svg = render_svg(build_ppi(frame_of([None] * 12), spec), 128)
        for numeral in range(1, 13):
            assert f">{numeral}</text>" in svg

    def test_rejects_tiny_canvas(self, spec):
        ppi = build_ppi(frame_of([None] * 12), spec)
        with pytest.raises(ValueError):
            render_svg(ppi, 63)
        assert render_svg(ppi, 64)


class TestTypes:
    def test_sector_validation(self):
        with pytest.raises(ValueError):
            PpiSector(0, 0.5, 10)
        with pytest.raises(ValueError):
            PpiSector(1, 1.5, 10)
        with pytest.raises(ValueError):
            PpiSector(1, 0.5, 256)

    def test_frame_requires_all_dodecants(self):
        sectors = tuple(PpiSector(d, 1.0, 0) for d in range(1, 12))
        with pytest.raises(ValueError):
            PpiFrame(seq=0, sectors=sectors)
        with pytest.raises(ValueError):
            PpiFrame(seq=0, sectors=sectors + (PpiSector(11, 1.0, 0),))
