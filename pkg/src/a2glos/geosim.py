"""Geometric Monte Carlo estimate of LoS probability.

Each trial builds a city of square footprints with Rayleigh heights, puts
the transmitter above the origin and the receiver at the requested ground
distance, and tests the straight ray against every footprint it crosses.

Two layouts are available:

``transect`` (default)
    The crossed buildings sit evenly along the link, ``N_b`` of them with
    width ``W``, exactly the arrangement the product model assumes.  Agreement
    with :mod:`a2glos.theoretical` checks its clearance geometry (far-edge
    heights, building count) and its height statistics.
``manhattan``
    A two-dimensional lattice of pitch ``W + S`` with random phase, random
    azimuth and the receiver placed on a street.  This is a harsher, more
    realistic world and does not reproduce the product model at short range.

Randomness is counter based: per-distance draws come from
``SeedSequence([seed, bits(distance)])`` and building heights are hashed from
a per-trial key and the lattice index, so results do not depend on how
trials are split across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError
from .scenario import BuiltUpScenario, building_count

TRANSECT = "transect"
MANHATTAN = "manhattan"
UNIFORM_AZIMUTH = "uniform-random"
FIXED_AZIMUTH = "fixed-list"

Z95 = 1.959963984540054


@dataclass(frozen=True, eq=False)
class BuildingGrid:
    """Explicit Manhattan city.

    Building (i, j) covers
    ``[i*pitch + off_x, i*pitch + off_x + footprint]`` x (same in y)
    and has height ``heights[i, j]``.
    """

    cell_pitch: float
    footprint: float
    heights: np.ndarray
    origin_offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        heights = np.array(self.heights, dtype=float)
        if heights.ndim != 2:
            raise ValueError("heights must be a 2-D array")
        if np.any(heights < 0):
            raise ValueError("building heights must be non-negative")
        if not self.cell_pitch > 0 or self.footprint < 0 or self.footprint > self.cell_pitch:
            raise DomainError("need cell_pitch > 0 and 0 <= footprint <= cell_pitch")
        heights.setflags(write=False)
        object.__setattr__(self, "heights", heights)

    @property
    def shape(self):
        return self.heights.shape

    def footprint_box(self, i: int, j: int) -> tuple[float, float, float, float]:
        x0 = i * self.cell_pitch + self.origin_offset[0]
        y0 = j * self.cell_pitch + self.origin_offset[1]
        return (x0, x0 + self.footprint, y0, y0 + self.footprint)


def synthesize_grid(scenario: BuiltUpScenario, extent: float, rng_seed) -> BuildingGrid:
    """Square city of side ``extent`` centred on the origin.

    Holds ``floor(extent / pitch)`` buildings per side with independent
    Rayleigh(gamma) heights and a uniformly random lattice phase.
    """
    pitch = scenario.pitch
    if not pitch > 0:
        raise DomainError("building pitch W + S must be positive")
    rng = np.random.default_rng(rng_seed)
    n = int(math.floor(extent / pitch))
    phase = rng.uniform(0.0, pitch, size=2)
    heights = rng.rayleigh(scenario.gamma, size=(n, n))
    offset = (float(-extent / 2 + phase[0]), float(-extent / 2 + phase[1]))
    return BuildingGrid(pitch, scenario.width, heights, offset)


def is_blocked(grid: BuildingGrid, tx, rx) -> bool:
    """Whether the straight segment tx -> rx passes through a building."""
    return bool(
        kernels.segment_blocked(
            grid.heights,
            grid.cell_pitch,
            grid.footprint,
            grid.origin_offset[0],
            grid.origin_offset[1],
            tuple(map(float, tx)),
            tuple(map(float, rx)),
        )
    )


def wilson_halfwidth(successes: int, trials: int, z: float = Z95) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    z2n = z * z / trials
    return z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))


@dataclass(frozen=True)
class SimConfig:
    scenario: BuiltUpScenario
    h_tx: float
    h_rx: float
    distances: tuple[float, ...]
    trials_per_distance: int = 10_000
    seed: int = 0
    azimuth_policy: str = UNIFORM_AZIMUTH
    azimuths: tuple[float, ...] = ()
    layout: str = TRANSECT
    frozen_city: bool = False

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        object.__setattr__(self, "azimuths", tuple(float(a) for a in self.azimuths))
        if self.trials_per_distance < 1:
            raise ValueError("trials_per_distance must be at least 1")
        if any(d < 0 for d in self.distances):
            raise DomainError("distances must be non-negative")
        if self.h_tx < 0 or self.h_rx < 0:
            raise DomainError("heights must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.layout not in (TRANSECT, MANHATTAN):
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.azimuth_policy not in (UNIFORM_AZIMUTH, FIXED_AZIMUTH):
            raise ValueError(f"unknown azimuth policy {self.azimuth_policy!r}")
        if self.azimuth_policy == FIXED_AZIMUTH and not self.azimuths:
            raise ValueError("fixed-list azimuth policy needs at least one azimuth")
        if self.frozen_city and self.layout != MANHATTAN:
            raise ValueError("frozen-city runs need the manhattan layout")

    def metadata(self) -> dict:
        meta = {
            "source": "simulated",
            "scenario": self.scenario.label,
            "alpha": self.scenario.alpha,
            "beta": self.scenario.beta,
            "gamma": self.scenario.gamma,
            "h_tx_m": self.h_tx,
            "h_rx_m": self.h_rx,
            "trials_per_distance": self.trials_per_distance,
            "seed": self.seed,
            "layout": self.layout,
            "azimuth_policy": self.azimuth_policy,
            "frozen_city": self.frozen_city,
        }
        if self.azimuth_policy == FIXED_AZIMUTH:
            meta["azimuths_rad"] = " ".join(repr(a) for a in self.azimuths)
        return meta


@dataclass(frozen=True)
class SimEstimate:
    distance: float
    p_los_hat: float
    trials: int
    wilson_halfwidth: float
    blocked: int = field(default=0, compare=False)


@dataclass
class _Batch:
    """Per-trial inputs for one distance; arrays of equal length."""

    rx_x: np.ndarray
    rx_y: np.ndarray
    off_x: np.ndarray
    off_y: np.ndarray
    keys: np.ndarray
    pitch: float
    bounds: tuple[int, int, int, int]


def _distance_rng(seed: int, distance: float) -> np.random.Generator:
    bits = int(np.float64(distance).view(np.uint64))
    return np.random.default_rng(np.random.SeedSequence([seed, bits]))


def _street_positions(rng, n, pitch, width):
    # uniform over the part of a lattice cell not covered by the footprint
    u = rng.uniform(0.0, pitch, n)
    v = rng.uniform(0.0, pitch, n)
    bad = (u < width) & (v < width)
    while bad.any():
        k = int(bad.sum())
        u[bad] = rng.uniform(0.0, pitch, k)
        v[bad] = rng.uniform(0.0, pitch, k)
        bad = (u < width) & (v < width)
    return u, v


def _azimuths(cfg: SimConfig, rng, n):
    if cfg.azimuth_policy == FIXED_AZIMUTH:
        return np.resize(np.array(cfg.azimuths, dtype=float), n)
    return rng.uniform(0.0, 2.0 * math.pi, n)


def _transect_batch(cfg: SimConfig, distance: float, rng) -> _Batch:
    n = cfg.trials_per_distance
    sc = cfg.scenario
    n_b = building_count(distance, sc)
    keys = rng.integers(0, 2**64, size=n, dtype=np.uint64, endpoint=False)
    rx_x = np.full(n, distance)
    rx_y = np.zeros(n)
    if n_b == 0:
        return _Batch(rx_x, rx_y, np.zeros(n), np.zeros(n), keys, 1.0, (0, -1, 0, -1))
    spacing = distance / n_b
    off_x = np.full(n, spacing / 2 - sc.width / 2)
    off_y = np.full(n, -sc.width / 2)
    return _Batch(rx_x, rx_y, off_x, off_y, keys, spacing, (0, n_b - 1, 0, 0))


def _manhattan_batch(cfg: SimConfig, distance: float, rng, city) -> _Batch:
    n = cfg.trials_per_distance
    sc = cfg.scenario
    pitch, width = sc.pitch, sc.width
    big = kernels.UNBOUNDED
    bounds = (-big, big, -big, big)
    if city is not None:
        # one fixed city; redraw azimuths that would put the receiver indoors
        key, ox, oy = city
        phi = _azimuths(cfg, rng, n)
        rx_x = distance * np.cos(phi)
        rx_y = distance * np.sin(phi)
        if distance > 0 and cfg.azimuth_policy == UNIFORM_AZIMUTH:
            for _ in range(1000):
                inside = (np.mod(rx_x - ox, pitch) < width) & (np.mod(rx_y - oy, pitch) < width)
                if not inside.any():
                    break
                phi[inside] = rng.uniform(0.0, 2.0 * math.pi, int(inside.sum()))
                rx_x = distance * np.cos(phi)
                rx_y = distance * np.sin(phi)
        keys = np.full(n, key, dtype=np.uint64)
        return _Batch(rx_x, rx_y, np.full(n, ox), np.full(n, oy), keys, pitch, bounds)

    phi = _azimuths(cfg, rng, n)
    u, v = _street_positions(rng, n, pitch, width)
    keys = rng.integers(0, 2**64, size=n, dtype=np.uint64, endpoint=False)
    rx_x = distance * np.cos(phi)
    rx_y = distance * np.sin(phi)
    return _Batch(rx_x, rx_y, rx_x - u, rx_y - v, keys, pitch, bounds)


def _frozen_city(cfg: SimConfig):
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
    key = int(rng.integers(0, 2**64, dtype=np.uint64, endpoint=False))
    ox, oy = rng.uniform(0.0, cfg.scenario.pitch, 2)
    return key, float(ox), float(oy)


def _trace(cfg: SimConfig, batch: _Batch, lo: int, hi: int) -> int:
    s = slice(lo, hi)
    flags = kernels.trace_batch(
        cfg.h_tx,
        batch.rx_x[s],
        batch.rx_y[s],
        cfg.h_rx,
        batch.off_x[s],
        batch.off_y[s],
        batch.keys[s],
        batch.pitch,
        cfg.scenario.width,
        cfg.scenario.gamma,
        *batch.bounds,
    )
    return int(np.count_nonzero(flags))


def estimate_curve(cfg: SimConfig, threads: int = 1) -> list[SimEstimate]:
    """Empirical LoS probability at each configured distance.

    ``threads`` only changes scheduling; the estimates are identical for any
    value.
    """
    city = _frozen_city(cfg) if cfg.frozen_city else None
    n = cfg.trials_per_distance
    chunks = max(1, min(int(threads), n))
    edges = np.linspace(0, n, chunks + 1).astype(int)
    out = []
    with ThreadPoolExecutor(max_workers=chunks) as pool:
        for distance in cfg.distances:
            rng = _distance_rng(cfg.seed, distance)
            if cfg.layout == TRANSECT:
                batch = _transect_batch(cfg, distance, rng)
            else:
                batch = _manhattan_batch(cfg, distance, rng, city)
            parts = pool.map(lambda k: _trace(cfg, batch, edges[k], edges[k + 1]), range(chunks))
            blocked = sum(parts)
            visible = n - blocked
            out.append(SimEstimate(distance, visible / n, n, wilson_halfwidth(visible, n), blocked))
    return out


def estimates_to_csv(estimates, metadata: dict | None = None, x_header: str = "d_rx_m", xs=None) -> str:
    """CSV body ``d_rx_m,p_los_hat,trials,ci95_halfwidth`` with ``#`` metadata."""
    lines = [f"# {k}: {v}" for k, v in (metadata or {}).items()]
    lines.append(f"{x_header},p_los_hat,trials,ci95_halfwidth")
    xs = [e.distance for e in estimates] if xs is None else list(xs)
    for x, e in zip(xs, estimates):
        lines.append(f"{x:.6f},{e.p_los_hat:.6f},{e.trials},{e.wilson_halfwidth:.6f}")
    return "\n".join(lines) + "\n"
