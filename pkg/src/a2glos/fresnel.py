"""First Fresnel zone geometry.

Used to show that at mmWave frequencies the zone is a couple of meters wide,
small against building dimensions, so blockage can be tested on the bare ray.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0


def wavelength(frequency: float) -> float:
    if not frequency > 0:
        raise DomainError(f"frequency must be positive, got {frequency!r}")
    return SPEED_OF_LIGHT / frequency


def first_fresnel_radius(frequency: float, d1: float, d2: float) -> float:
    """Radius of the first Fresnel zone at the point splitting the path into d1, d2."""
    lam = wavelength(frequency)
    if d1 < 0 or d2 < 0 or d1 + d2 <= 0:
        raise DomainError("need d1 >= 0, d2 >= 0 and d1 + d2 > 0")
    return math.sqrt(lam * d1 * d2 / (d1 + d2))


def max_zone_width(frequency: float, total_distance: float) -> float:
    """Full width (diameter) of the first zone at mid-path."""
    half = total_distance / 2.0
    return 2.0 * first_fresnel_radius(frequency, half, half)


def max_distance_for_width(frequency: float, width: float) -> float:
    """Longest link whose mid-path first-zone width stays within ``width``."""
    # width = 2 sqrt(lam D / 4) = sqrt(lam D)
    return width**2 / wavelength(frequency)


@dataclass(frozen=True)
class FresnelProfile:
    frequency: float
    total_distance: float
    d1: np.ndarray
    radius: np.ndarray

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.d1.tolist(), self.radius.tolist()))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(f"# frequency_hz: {self.frequency:g}\n")
        buf.write(f"# total_distance_m: {self.total_distance:g}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["d1_m", "radius_m"])
        for d, r in zip(self.d1, self.radius):
            writer.writerow([f"{d:.6f}", f"{r:.6f}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def profile(frequency: float, total_distance: float, n_samples: int) -> FresnelProfile:
    """Evenly sampled first-zone radius along a link.

    Use an odd ``n_samples`` to land a sample exactly on the midpoint.
    """
    if n_samples < 3:
        raise DomainError("n_samples must be at least 3")
    if not total_distance > 0:
        raise DomainError("total_distance must be positive")
    lam = wavelength(frequency)
    d1 = np.linspace(0.0, total_distance, n_samples)
    d2 = total_distance - d1
    radius = np.sqrt(np.clip(lam * d1 * d2 / total_distance, 0.0, None))
    radius[0] = radius[-1] = 0.0
    return FresnelProfile(frequency, total_distance, d1, radius)
