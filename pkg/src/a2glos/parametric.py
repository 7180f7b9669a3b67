"""Closed-form LoS probability with height-dependent breakpoint and decay.

    P = min(D1/d, 1) * (1 - exp(-d/D2)) + exp(-d/D2)
    D1 = a1 * h'**b1 + c1,   D2 = a2 * h'**b2

where ``h'`` is the TX height above the receiver plane and ``d`` the
horizontal distance.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .curves import DISTANCE, ELEVATION, ProbabilityCurve
from .errors import DomainError
from .scenario import ScenarioPreset, read_key_values, write_key_values


@dataclass(frozen=True)
class ParametricCoeffs:
    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    scenario_label: str | None = None

    def breakpoint(self, h_prime):
        """D1: distance up to which the model predicts certain LoS."""
        return self.a1 * np.power(h_prime, self.b1) + self.c1

    def decay(self, h_prime):
        """D2: exponential decay length beyond the breakpoint."""
        return self.a2 * np.power(h_prime, self.b2)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.a1, self.b1, self.c1, self.a2, self.b2)

    def save(self, path) -> None:
        values = {k: repr(v) for k, v in asdict(self).items() if k != "scenario_label"}
        if self.scenario_label:
            values["scenario"] = self.scenario_label
        write_key_values(path, values)

    @classmethod
    def load(cls, path) -> ParametricCoeffs:
        values = read_key_values(path)
        missing = {"a1", "b1", "c1", "a2", "b2"} - values.keys()
        if missing:
            raise ValueError(f"{path}: missing keys {sorted(missing)}")
        return cls(
            *(float(values[k]) for k in ("a1", "b1", "c1", "a2", "b2")),
            scenario_label=values.get("scenario"),
        )


# Published MMSE fits, one row per preset.
_TABLE2 = {
    ScenarioPreset.SUBURBAN: (1.698, 1.082, 30.07, 38.63, 0.4911),
    ScenarioPreset.URBAN: (0.3891, 1.098, 23.92, 21.31, 0.4770),
    ScenarioPreset.DENSE_URBAN: (0.3475, 1.018, 20.15, 18.87, 0.4461),
    ScenarioPreset.HIGH_RISE_URBAN: (0.1885, 0.9723, 17.31, 15.70, 0.4106),
}


def table2_preset(preset: ScenarioPreset | str) -> ParametricCoeffs:
    if isinstance(preset, str):
        preset = ScenarioPreset.from_name(preset)
    return ParametricCoeffs(*_TABLE2[preset], scenario_label=preset.slug)


def eval_array(coeffs: ParametricCoeffs, h_prime, d_rx) -> np.ndarray:
    """Vectorised model evaluation; ``d_rx == 0`` maps to 1."""
    h_prime, d_rx = np.broadcast_arrays(np.asarray(h_prime, float), np.asarray(d_rx, float))
    if np.any(h_prime < 0) or np.any(d_rx < 0):
        raise DomainError("h_prime and d_rx must be non-negative")
    d1 = coeffs.breakpoint(h_prime)
    d2 = coeffs.decay(h_prime)
    if np.any(~(d2 > 0)):
        raise DomainError("decay length D2 must be positive (is h_prime zero?)")
    tail = np.exp(-d_rx / d2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d_rx > 0, d1 / d_rx, 1.0)
    near = np.minimum(ratio, 1.0)
    return np.clip(near * (1.0 - tail) + tail, 0.0, 1.0)


def eval(coeffs: ParametricCoeffs, h_prime: float, d_rx: float) -> float:  # noqa: A001
    if h_prime < 0 or d_rx < 0:
        raise DomainError("h_prime and d_rx must be non-negative")
    d2 = coeffs.a2 * h_prime**coeffs.b2
    if not d2 > 0:
        raise DomainError(f"decay length D2 must be positive, got {d2!r}")
    if d_rx == 0:
        return 1.0
    d1 = coeffs.a1 * h_prime**coeffs.b1 + coeffs.c1
    tail = math.exp(-d_rx / d2)
    return min(d1 / d_rx, 1.0) * (1.0 - tail) + tail


def eval_by_elevation(coeffs: ParametricCoeffs, h_prime: float, theta: float) -> float:
    """Evaluate at elevation angle ``theta`` (radians) seen from the receiver."""
    if not 0 < theta <= math.pi / 2:
        raise DomainError(f"theta must lie in (0, pi/2], got {theta!r}")
    if not h_prime > 0:
        raise DomainError("h_prime must be positive for an elevation view")
    if theta == math.pi / 2:
        d_rx = 0.0
    else:
        d_rx = h_prime / math.tan(theta)
    return eval(coeffs, h_prime, d_rx)


def elevation_to_distance(h_prime: float, thetas) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas <= 0) or np.any(thetas > math.pi / 2):
        raise DomainError("theta must lie in (0, pi/2]")
    d = h_prime / np.tan(thetas)
    return np.where(thetas == math.pi / 2, 0.0, d)


def curve(coeffs: ParametricCoeffs, h_prime: float, distances) -> ProbabilityCurve:
    distances = np.asarray(distances, dtype=float)
    meta = {"source": "parametric", "scenario": coeffs.scenario_label or "custom", "h_prime_m": h_prime}
    return ProbabilityCurve(distances, eval_array(coeffs, h_prime, distances), DISTANCE, meta)


def elevation_curve(coeffs: ParametricCoeffs, h_prime: float, thetas) -> ProbabilityCurve:
    thetas = np.asarray(thetas, dtype=float)
    p = eval_array(coeffs, h_prime, elevation_to_distance(h_prime, thetas))
    meta = {"source": "parametric", "scenario": coeffs.scenario_label or "custom", "h_prime_m": h_prime}
    return ProbabilityCurve(thetas, p, ELEVATION, meta)
