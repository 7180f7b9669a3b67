import math

import numpy as np
import pytest

from a2glos.errors import DomainError
from a2glos.fresnel import (
    SPEED_OF_LIGHT,
    first_fresnel_radius,
    max_distance_for_width,
    max_zone_width,
    profile,
    wavelength,
)

F28 = 28e9
# 50-digit mpmath oracle values
RADIUS_250_250 = 1.1568747501350351
WIDTH_1000 = 3.2721359232159046
LIMIT_2P5 = 583.7371665967661


class TestFormulae:
    def test_wavelength(self):
        assert wavelength(F28) == pytest.approx(0.0107068735, rel=1e-9)
        assert SPEED_OF_LIGHT == 299792458.0

    def test_radius_oracle(self):
        assert first_fresnel_radius(F28, 250, 250) == pytest.approx(RADIUS_250_250, rel=1e-14)
        assert first_fresnel_radius(F28, 250, 250) == pytest.approx(1.157, abs=1e-3)

    def test_endpoints(self):
        assert first_fresnel_radius(F28, 0, 500) == 0.0
        assert first_fresnel_radius(F28, 500, 0) == 0.0

    def test_symmetry_and_midpoint_max(self, rng):
        for _ in range(100):
            f = rng.uniform(1e9, 100e9)
            d1, d2 = rng.uniform(0, 2000, 2)
            assert first_fresnel_radius(f, d1, d2) == pytest.approx(first_fresnel_radius(f, d2, d1), rel=1e-14)
            half = (d1 + d2) / 2
            assert first_fresnel_radius(f, d1, d2) <= first_fresnel_radius(f, half, half) + 1e-12

    def test_width_claims(self):
        assert max_zone_width(F28, 1000.0) == pytest.approx(WIDTH_1000, rel=1e-13)
        assert max_zone_width(F28, 1000.0) <= 3.3
        assert max_distance_for_width(F28, 2.5) == pytest.approx(LIMIT_2P5, rel=1e-13)
        assert max_zone_width(F28, 580.0) <= 2.5
        assert max_zone_width(F28, 600.0) > 2.5

    def test_inverse(self, rng):
        for w in rng.uniform(0.1, 10, 20):
            assert max_zone_width(F28, max_distance_for_width(F28, w)) == pytest.approx(w, rel=1e-12)

    @pytest.mark.parametrize("args", [(0.0, 1, 1), (-1e9, 1, 1), (F28, -1, 1), (F28, 0, 0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            first_fresnel_radius(*args)


class TestProfile:
    def test_samples(self):
        prof = profile(F28, 500.0, 101)
        assert len(prof.samples) == 101
        assert prof.radius[0] == 0.0 and prof.radius[-1] == 0.0
        assert prof.radius[50] == pytest.approx(RADIUS_250_250, rel=1e-13)
        assert np.argmax(prof.radius) == 50

    def test_csv(self, tmp_path):
        text = profile(F28, 100.0, 5).to_csv(tmp_path / "f.csv")
        lines = [l for l in text.splitlines() if not l.startswith("#")]
        assert lines[0] == "d1_m,radius_m"
        assert len(lines) == 6
        assert (tmp_path / "f.csv").read_text() == text

    def test_too_few_samples(self):
        with pytest.raises(DomainError):
            profile(F28, 100.0, 2)


def test_claim_within_two_and_a_half_meters_is_distance_limited():
    # mid-path width grows like sqrt(distance)
    widths = [max_zone_width(F28, d) for d in (100, 300, 580, 1000)]
    assert widths == sorted(widths)
    assert math.isclose(widths[-1] / widths[0], math.sqrt(10), rel_tol=1e-12)
