import math

import numpy as np
import pytest
from scipy.integrate import quad

from a2glos.errors import DomainError
from a2glos.scenario import (
    BuiltUpScenario,
    ScenarioPreset,
    building_count,
    derive_spacing,
    derive_width,
    height_cdf,
    height_pdf,
    load_scenario,
    preset,
    resolve_scenario,
)

PUBLISHED_GEOMETRY = {
    ScenarioPreset.SUBURBAN: (0.1, 750, 8, 11.55, 24.97),
    ScenarioPreset.URBAN: (0.3, 500, 15, 24.49, 20.23),
    ScenarioPreset.DENSE_URBAN: (0.5, 300, 20, 40.82, 16.91),
    ScenarioPreset.HIGH_RISE_URBAN: (0.5, 300, 20, 40.82, 16.91),
}


class TestDerivedGeometry:
    def test_width_examples(self):
        assert derive_width(0.1, 750) == pytest.approx(11.55, abs=0.01)
        assert derive_width(0.5, 300) == pytest.approx(40.82, abs=0.01)
        assert derive_width(1.0, 1e6) == pytest.approx(1.0)

    def test_spacing_examples(self):
        assert derive_spacing(0.1, 750) == pytest.approx(24.97, abs=0.01)
        assert derive_spacing(0.3, 500) == pytest.approx(20.23, abs=0.01)
        assert derive_spacing(1.0, 123.0) == 0.0

    @pytest.mark.parametrize("alpha,beta", [(0.0, 100), (-0.1, 100), (1.5, 100), (0.3, 0.0), (0.3, -5)])
    def test_domain_errors(self, alpha, beta):
        with pytest.raises(DomainError):
            derive_width(alpha, beta)
        with pytest.raises(DomainError):
            derive_spacing(alpha, beta)

    @pytest.mark.parametrize("p", list(ScenarioPreset))
    def test_presets_match_table(self, p):
        alpha, beta, gamma, w, s = PUBLISHED_GEOMETRY[p]
        sc = p.scenario()
        assert (sc.alpha, sc.beta, sc.gamma) == (alpha, beta, gamma)
        assert round(sc.width, 2) == w
        assert round(sc.spacing, 2) == s

    def test_scenario_invariants(self, rng):
        for _ in range(200):
            alpha = rng.uniform(1e-3, 1.0)
            beta = rng.uniform(1.0, 5000.0)
            sc = BuiltUpScenario(alpha, beta, rng.uniform(0.5, 50))
            assert sc.width == pytest.approx(1000 * math.sqrt(alpha / beta), rel=1e-9)
            assert sc.spacing == pytest.approx(1000 / math.sqrt(beta) * (1 - math.sqrt(alpha)), rel=1e-9)
            assert sc.width > 0 and sc.spacing >= 0

    def test_scenario_rejects_bad_gamma(self):
        with pytest.raises(DomainError):
            BuiltUpScenario(0.3, 500, 0.0)

    def test_scenario_is_immutable(self, suburban):
        with pytest.raises(AttributeError):
            suburban.alpha = 0.5


class TestPresetLookup:
    @pytest.mark.parametrize(
        "name,expected",
        [("suburban", ScenarioPreset.SUBURBAN), ("URBAN", ScenarioPreset.URBAN),
         ("Dense-Urban", ScenarioPreset.DENSE_URBAN), ("high_rise_urban", ScenarioPreset.HIGH_RISE_URBAN),
         ("highriseurban", ScenarioPreset.HIGH_RISE_URBAN)],
    )
    def test_case_insensitive(self, name, expected):
        assert ScenarioPreset.from_name(name) is expected

    def test_unknown(self):
        with pytest.raises(KeyError):
            preset("rural")

    def test_dense_and_high_rise_are_identical(self):
        a, b = preset("dense-urban"), preset("high-rise-urban")
        assert (a.alpha, a.beta, a.gamma) == (b.alpha, b.beta, b.gamma)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "town.cfg"
        path.write_text("# my town\nalpha = 0.2\nbeta: 400\ngamma=12\n")
        sc = load_scenario(path)
        assert (sc.alpha, sc.beta, sc.gamma) == (0.2, 400.0, 12.0)
        assert sc.name == "town"
        assert resolve_scenario(str(path)) == sc

    def test_load_missing_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("alpha = 0.2\nbeta = 400\n")
        with pytest.raises(ValueError, match="gamma"):
            load_scenario(path)


class TestBuildingCount:
    def test_examples(self, suburban):
        # floor(sqrt(0.1 * 750)) = floor(8.660)
        assert building_count(1000, suburban) == 8
        assert building_count(0, suburban) == 0
        # floor(sqrt(0.5 * 300)) = floor(12.247)
        assert building_count(1000, preset("dense-urban")) == 12

    def test_monotone_and_scale_consistent(self, rng):
        for p in ScenarioPreset:
            sc = p.scenario()
            d = np.sort(rng.uniform(0, 5000, 300))
            counts = [building_count(x, sc) for x in d]
            assert all(a <= b for a, b in zip(counts, counts[1:]))
            for x in d:
                assert building_count(2 * x, sc) >= 2 * building_count(x, sc) - 1

    def test_negative_distance(self, suburban):
        with pytest.raises(DomainError):
            building_count(-1.0, suburban)


class TestHeightDistribution:
    def test_pdf_values(self):
        assert height_pdf(0.0, 8.0) == 0.0
        assert height_pdf(-3.0, 8.0) == 0.0
        assert height_pdf(15.0, 15.0) == pytest.approx(math.exp(-0.5) / 15.0, rel=1e-14)

    @pytest.mark.parametrize("gamma", [0.5, 8.0, 15.0, 20.0, 120.0])
    def test_pdf_normalised(self, gamma):
        total, _ = quad(height_pdf, 0, np.inf, args=(gamma,))
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_cdf_values(self):
        assert height_cdf(0.0, 8.0) == 0.0
        assert height_cdf(-10.0, 8.0) == 0.0
        assert height_cdf(800.0, 8.0) == pytest.approx(1.0, abs=1e-12)
        assert height_cdf(8.0 * math.sqrt(2 * math.log(2)), 8.0) == pytest.approx(0.5, rel=1e-12)

    def test_cdf_matches_pdf_quadrature(self, rng):
        for _ in range(100):
            gamma = rng.uniform(1, 40)
            h = rng.uniform(0, 4 * gamma)
            integral, _ = quad(height_pdf, 0, h, args=(gamma,))
            assert height_cdf(h, gamma) == pytest.approx(integral, abs=1e-6)

    def test_cdf_monotonicity(self, rng):
        for _ in range(300):
            g = rng.uniform(1, 40)
            h1, h2 = np.sort(rng.uniform(0, 100, 2))
            assert height_cdf(h1, g) <= height_cdf(h2, g)
            g2 = g + rng.uniform(0, 20)
            assert height_cdf(h2, g2) <= height_cdf(h2, g)

    @pytest.mark.parametrize("fn", [height_pdf, height_cdf])
    def test_gamma_domain(self, fn):
        with pytest.raises(DomainError):
            fn(1.0, 0.0)
