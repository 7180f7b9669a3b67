"""Built-up scenario parameters and derived building geometry.

A scenario is the ITU-R P.1410 triple: ``alpha`` (fraction of land covered
by buildings), ``beta`` (buildings per km^2) and ``gamma`` (Rayleigh scale of
building height, in meters).  Building width and street spacing follow from
``alpha`` and ``beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DomainError


def _check_alpha_beta(alpha: float, beta: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not beta > 0.0:
        raise DomainError(f"beta must be positive, got {beta!r}")


def _check_gamma(gamma: float) -> None:
    if not gamma > 0.0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")


def derive_width(alpha: float, beta: float) -> float:
    """Building width in meters, ``1000 * sqrt(alpha / beta)``."""
    _check_alpha_beta(alpha, beta)
    return 1000.0 * math.sqrt(alpha / beta)


def derive_spacing(alpha: float, beta: float) -> float:
    """Street spacing between buildings in meters."""
    _check_alpha_beta(alpha, beta)
    return (1000.0 / math.sqrt(beta)) * (1.0 - math.sqrt(alpha))


@dataclass(frozen=True)
class BuiltUpScenario:
    alpha: float
    beta: float
    gamma: float
    name: str | None = None
    width: float = field(init=False)
    spacing: float = field(init=False)

    def __post_init__(self):
        _check_alpha_beta(self.alpha, self.beta)
        _check_gamma(self.gamma)
        object.__setattr__(self, "width", derive_width(self.alpha, self.beta))
        object.__setattr__(self, "spacing", derive_spacing(self.alpha, self.beta))

    @property
    def pitch(self) -> float:
        """Center-to-center distance of neighbouring buildings (W + S)."""
        return self.width + self.spacing

    @property
    def label(self) -> str:
        return self.name or f"alpha={self.alpha:g},beta={self.beta:g},gamma={self.gamma:g}"


class ScenarioPreset(Enum):
    """The four standard built-up environments.

    ``DENSE_URBAN`` and ``HIGH_RISE_URBAN`` carry identical environment
    parameters in the published table even though their fitted parametric
    coefficients differ.  Both rows are kept exactly as published.
    """

    SUBURBAN = ("suburban", 0.1, 750.0, 8.0)
    URBAN = ("urban", 0.3, 500.0, 15.0)
    DENSE_URBAN = ("dense-urban", 0.5, 300.0, 20.0)
    HIGH_RISE_URBAN = ("high-rise-urban", 0.5, 300.0, 20.0)

    def __init__(self, slug, alpha, beta, gamma):
        self.slug = slug
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma

    def scenario(self) -> BuiltUpScenario:
        return BuiltUpScenario(self.alpha, self.beta, self.gamma, name=self.slug)

    @classmethod
    def from_name(cls, name: str) -> ScenarioPreset:
        key = name.strip().lower().replace("_", "-").replace(" ", "-")
        for preset in cls:
            if preset.slug == key or preset.slug.replace("-", "") == key:
                return preset
        names = ", ".join(p.slug for p in cls)
        raise KeyError(f"unknown scenario {name!r}; expected one of: {names}")


def preset(name: str) -> BuiltUpScenario:
    """Look up a preset scenario by case-insensitive name."""
    return ScenarioPreset.from_name(name).scenario()


def read_key_values(path) -> dict[str, str]:
    """Parse a ``key = value`` file; blank lines and ``#`` comments are skipped."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        elif ":" in line:
            key, value = line.split(":", 1)
        else:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        values[key.strip().lower()] = value.strip()
    return values


def write_key_values(path, values: dict) -> None:
    lines = [f"{key} = {value}" for key, value in values.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_scenario(path) -> BuiltUpScenario:
    """Load a custom scenario from a key-value file with alpha, beta, gamma."""
    values = read_key_values(path)
    missing = {"alpha", "beta", "gamma"} - values.keys()
    if missing:
        raise ValueError(f"{path}: missing keys {sorted(missing)}")
    return BuiltUpScenario(
        float(values["alpha"]),
        float(values["beta"]),
        float(values["gamma"]),
        name=values.get("name") or Path(path).stem,
    )


def resolve_scenario(spec: str) -> BuiltUpScenario:
    """Resolve a preset name or, failing that, a scenario file path."""
    try:
        return preset(spec)
    except KeyError:
        if Path(spec).is_file():
            return load_scenario(spec)
        raise


def building_count(d_rx: float, scenario: BuiltUpScenario) -> int:
    """Number of buildings crossed by a link of ground length ``d_rx``."""
    if d_rx < 0:
        raise DomainError(f"d_rx must be non-negative, got {d_rx!r}")
    return math.floor(d_rx * math.sqrt(scenario.alpha * scenario.beta) / 1000.0)


def height_pdf(h: float, gamma: float) -> float:
    """Rayleigh density of building height."""
    _check_gamma(gamma)
    if h < 0:
        return 0.0
    return h / gamma**2 * math.exp(-(h * h) / (2.0 * gamma**2))


def height_cdf(h: float, gamma: float) -> float:
    """Probability that a building is lower than ``h``.

    Zero for negative ``h``: the Rayleigh law has no mass below ground.
    """
    _check_gamma(gamma)
    if h <= 0:
        return 0.0
    return -math.expm1(-(h * h) / (2.0 * gamma**2))
