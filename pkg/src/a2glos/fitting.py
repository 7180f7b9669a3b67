"""Least-squares fit of the parametric model to the theoretical surface.

The fit runs in two stages.  For every height ``h'`` the breakpoint D1 and
decay length D2 are chosen to minimise the mean squared error against the
theoretical curve.  Power laws are then regressed through the per-height
values: ``D1 = a1 h'^b1 + c1`` and ``D2 = a2 h'^b2``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import parametric
from .curves import ProbabilityCurve
from .errors import DomainError, FitError
from .parametric import ParametricCoeffs
from .scenario import BuiltUpScenario
from .theoretical import los_probability_array

MIN_CURVE_POINTS = 20
DEFAULT_H_PRIME_GRID = tuple(float(h) for h in range(10, 501, 10))
DEFAULT_D_RX_GRID = tuple(float(d) for d in range(10, 1001, 10))

# exponent search window for the power-law regression
_B_LO, _B_HI, _B_STEP = -3.0, 4.0, 0.005
# per-height fits this close to a search bound are treated as unidentified
_BOUND_FRACTION = 0.999
_DECAY_OBSERVED = 0.5


def _check_grid(name, grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D grid")
    if np.any(np.diff(grid) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    if np.any(grid < 0):
        raise ValueError(f"{name} values must be non-negative")
    return grid


@dataclass(frozen=True)
class FitConfig:
    scenario: BuiltUpScenario
    h_prime_grid: tuple[float, ...] = DEFAULT_H_PRIME_GRID
    d_rx_grid: tuple[float, ...] = DEFAULT_D_RX_GRID
    tolerance: float = 1e-6
    max_iterations: int = 4000

    def __post_init__(self):
        object.__setattr__(self, "h_prime_grid", tuple(_check_grid("h_prime_grid", self.h_prime_grid)))
        object.__setattr__(self, "d_rx_grid", tuple(_check_grid("d_rx_grid", self.d_rx_grid)))
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class FitResult:
    coeffs: ParametricCoeffs
    per_height_breakpoints: list[tuple[float, float, float]]
    per_height_mse: list[float]
    final_mse: float
    max_gap: float
    iterations_used: int
    two_stage_mse: float = float("nan")
    regression_heights: int = 0

    def report_csv(self, path=None, metadata: dict | None = None) -> str:
        buf = io.StringIO()
        for key, value in (metadata or {}).items():
            buf.write(f"# {key}: {value}\n")
        buf.write(f"# final_mse: {self.final_mse:.9g}\n")
        buf.write(f"# max_gap: {self.max_gap:.9g}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["h_prime_m", "D1_m", "D2_m", "per_height_mse"])
        for (h, d1, d2), mse in zip(self.per_height_breakpoints, self.per_height_mse):
            writer.writerow([f"{h:.6f}", f"{d1:.6f}", f"{d2:.6f}", f"{mse:.9g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def breakpoint_model(d, d1, d2) -> np.ndarray:
    """``min(D1/d, 1) (1 - exp(-d/D2)) + exp(-d/D2)`` with value 1 at d = 0."""
    d = np.asarray(d, dtype=float)
    tail = np.exp(-d / d2)
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.where(d > 0, np.minimum(d1 / d, 1.0), 1.0)
    return near * (1.0 - tail) + tail


def _fit_height(d, p, tolerance, max_iterations):
    """Best (D1, D2) for one curve; returns (d1, d2, mse, iterations)."""
    if np.ptp(p) == 0:
        raise FitError("curve is constant; no decay to fit")
    scale = float(d.max())
    d2_hi = 10.0 * scale

    # coarse seed over the bounded search box
    d1_seed = np.linspace(0.0, scale, 201)
    d2_seed = np.geomspace(1e-3 * scale, d2_hi, 161)
    tail = np.exp(-d[None, :] / d2_seed[:, None])
    best = (np.inf, 0.0, 0.0)
    for d1 in d1_seed:
        with np.errstate(divide="ignore", invalid="ignore"):
            near = np.where(d > 0, np.minimum(d1 / d, 1.0), 1.0)
        err = np.mean((near * (1.0 - tail) + tail - p) ** 2, axis=1)
        k = int(np.argmin(err))
        if err[k] < best[0]:
            best = (float(err[k]), float(d1), float(d2_seed[k]))

    def objective(x):
        return float(np.mean((breakpoint_model(d, x[0] * scale, x[1] * scale) - p) ** 2))

    res = minimize(
        objective,
        x0=[best[1] / scale, best[2] / scale],
        method="Nelder-Mead",
        bounds=[(0.0, 1.0), (1e-6, d2_hi / scale)],
        options={"xatol": tolerance, "fatol": 1e-15, "maxiter": max_iterations},
    )
    x = res.x if res.fun <= best[0] else np.array([best[1] / scale, best[2] / scale])
    mse = min(float(res.fun), best[0])
    return float(x[0] * scale), float(x[1] * scale), mse, int(res.nit)


def fit_per_height(
    theoretical_curve: ProbabilityCurve,
    h_prime: float,
    tolerance: float = 1e-6,
    max_iterations: int = 4000,
) -> tuple[float, float]:
    """Breakpoint D1 and decay D2 minimising the MSE against one curve.

    ``h_prime`` only labels the fit; the curve carries the data.
    """
    if len(theoretical_curve) < MIN_CURVE_POINTS:
        raise ValueError(f"need at least {MIN_CURVE_POINTS} distances, got {len(theoretical_curve)}")
    try:
        d1, d2, _, _ = _fit_height(theoretical_curve.x, theoretical_curve.p, tolerance, max_iterations)
    except FitError as exc:
        raise FitError(f"h'={h_prime:g} m: {exc}") from None
    return d1, d2


def _linear_solve(basis, y):
    coef, _, _, _ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coef
    return coef, float(resid @ resid)


def fit_power_law(samples, with_offset: bool, nonnegative_offset: bool = False) -> tuple[float, float, float]:
    """Least-squares ``y = a h^b + c`` (``c = 0`` unless ``with_offset``).

    The exponent is found by a 1-D search; for each trial exponent the
    linear coefficients come from an exact least-squares solve.  With
    ``nonnegative_offset`` the solve is restricted to ``c >= 0``.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError("samples must be (h, y) pairs")
    h, y = samples[:, 0], samples[:, 1]
    if np.any(h <= 0):
        raise DomainError("power-law abscissae must be positive")
    if np.unique(h).size < 2:
        raise FitError("singular fit: all h' values are equal")
    needed = 3 if with_offset else 2
    if h.size < needed:
        raise FitError(f"need at least {needed} samples, got {h.size}")
    log_h = np.log(h)
    if not with_offset and h.size == 2 and np.all(y > 0):
        # two equations, two unknowns: interpolate exactly
        b = float((np.log(y[1]) - np.log(y[0])) / (log_h[1] - log_h[0]))
        return float(y[0] / h[0] ** b), b, 0.0

    def basis(b):
        col = np.exp(b * log_h)[:, None]
        return np.hstack([col, np.ones_like(col)]) if with_offset else col

    def solve(b):
        coef, rss = _linear_solve(basis(b), y)
        if with_offset and nonnegative_offset and coef[1] < 0:
            # convex problem: the constrained optimum sits on c = 0
            coef, rss = _linear_solve(basis(b)[:, :1], y)
            coef = np.array([coef[0], 0.0])
        return coef, rss

    def residual(b):
        return solve(b)[1]

    grid = np.arange(_B_LO, _B_HI + _B_STEP / 2, _B_STEP)
    values = np.array([residual(b) for b in grid])
    k = int(np.argmin(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(residual, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    b = float(res.x) if res.fun <= values[k] else float(grid[k])
    coef, _ = solve(b)
    a = float(coef[0])
    c = float(coef[1]) if with_offset else 0.0
    return a, b, c


def _surface_mse(coeffs, h_grid, d_grid, surface):
    model = parametric.eval_array(coeffs, h_grid[:, None], d_grid[None, :])
    return float(np.mean((model - surface) ** 2))


def _polish(coeffs, h_grid, d_grid, surface, tolerance, max_iterations):
    """Joint local refinement of all five coefficients from a two-stage start.

    a2 is searched in log space so the decay length stays positive; c1 is
    kept non-negative so the breakpoint is a valid distance.
    """

    def objective(x):
        c = ParametricCoeffs(x[0], x[1], x[2], float(np.exp(x[3])), x[4])
        try:
            with np.errstate(over="ignore", invalid="ignore", under="ignore"):
                value = _surface_mse(c, h_grid, d_grid, surface)
        except DomainError:
            return np.inf
        return value if np.isfinite(value) else np.inf

    x0 = np.array([coeffs.a1, coeffs.b1, coeffs.c1, np.log(coeffs.a2), coeffs.b2])
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        bounds=[(None, None), (None, None), (0.0, None), (None, None), (None, None)],
        options={"xatol": tolerance, "fatol": 1e-15, "maxiter": 5 * max_iterations,
                 "maxfev": 5 * max_iterations, "adaptive": True},
    )
    if not res.fun < objective(x0):
        return coeffs, 0
    a1, b1, c1, log_a2, b2 = (float(v) for v in res.x)
    return ParametricCoeffs(a1, b1, c1, float(np.exp(log_a2)), b2, coeffs.scenario_label), int(res.nit)


def fit_surface(
    h_prime_grid,
    d_rx_grid,
    surface,
    tolerance: float = 1e-6,
    max_iterations: int = 4000,
    label: str | None = None,
    polish: bool = True,
) -> FitResult:
    """Fit the parametric model to ``surface[i, j]`` sampled at (h'_i, d_j).

    Only heights whose curve falls below one half inside the distance grid,
    with (D1, D2) off the search bounds, enter the power-law regression;
    elsewhere the decay is barely observed and D2 is poorly determined.  With ``polish`` the
    five coefficients are then refined jointly against the whole surface.
    """
    h_grid = _check_grid("h_prime_grid", h_prime_grid)
    d_grid = _check_grid("d_rx_grid", d_rx_grid)
    surface = np.asarray(surface, dtype=float)
    if surface.shape != (h_grid.size, d_grid.size):
        raise ValueError("surface shape must be (len(h_prime_grid), len(d_rx_grid))")
    if d_grid.size < MIN_CURVE_POINTS:
        raise ValueError(f"need at least {MIN_CURVE_POINTS} distances")
    if np.any(h_grid <= 0):
        raise DomainError("h_prime_grid must be positive")

    per_height = []
    per_mse = []
    iterations = 0
    for h, row in zip(h_grid, surface):
        try:
            d1, d2, mse, nit = _fit_height(d_grid, row, tolerance, max_iterations)
        except FitError as exc:
            raise FitError(f"h'={h:g} m: {exc}") from None
        per_height.append((float(h), d1, d2))
        per_mse.append(mse)
        iterations += nit

    d_max = float(d_grid.max())
    informative = [
        (h, d1, d2) for (h, d1, d2), row in zip(per_height, surface)
        if row.min() <= _DECAY_OBSERVED
        and d1 < _BOUND_FRACTION * d_max and d2 < _BOUND_FRACTION * 10.0 * d_max
    ]
    if len(informative) < 3:
        informative = per_height
    d1s = np.array([[h, d1] for h, d1, _ in informative])
    d2s = np.array([[h, d2] for h, _, d2 in informative])
    a1, b1, c1 = fit_power_law(d1s, with_offset=True, nonnegative_offset=True)
    a2, b2, _ = fit_power_law(d2s, with_offset=False)
    if not a2 > 0:
        raise FitError(f"decay power law has non-positive scale a2={a2:g}")
    coeffs = ParametricCoeffs(a1, b1, c1, a2, b2, scenario_label=label)
    two_stage_mse = _surface_mse(coeffs, h_grid, d_grid, surface)
    if polish:
        coeffs, nit = _polish(coeffs, h_grid, d_grid, surface, tolerance, max_iterations)
        iterations += nit

    gap = parametric.eval_array(coeffs, h_grid[:, None], d_grid[None, :]) - surface
    return FitResult(
        coeffs=coeffs,
        per_height_breakpoints=per_height,
        per_height_mse=per_mse,
        final_mse=float(np.mean(gap**2)),
        max_gap=float(np.max(np.abs(gap))),
        iterations_used=iterations,
        two_stage_mse=two_stage_mse,
        regression_heights=len(informative),
    )


def theoretical_surface(scenario: BuiltUpScenario, h_prime_grid, d_rx_grid) -> np.ndarray:
    """Product-model probabilities with the receiver on the reference plane (h_rx = 0)."""
    h = np.asarray(h_prime_grid, dtype=float)[:, None]
    d = np.asarray(d_rx_grid, dtype=float)[None, :]
    return los_probability_array(h, 0.0, d, scenario)


def fit_scenario(config: FitConfig) -> FitResult:
    surface = theoretical_surface(config.scenario, config.h_prime_grid, config.d_rx_grid)
    return fit_surface(
        config.h_prime_grid,
        config.d_rx_grid,
        surface,
        tolerance=config.tolerance,
        max_iterations=config.max_iterations,
        label=config.scenario.name,
    )


def error_surface(coeffs: ParametricCoeffs, scenario: BuiltUpScenario, h_prime_grid, d_rx_grid) -> np.ndarray:
    """Squared gap between product and parametric models on an (h', d) grid."""
    h = np.asarray(h_prime_grid, dtype=float)
    d = np.asarray(d_rx_grid, dtype=float)
    theo = theoretical_surface(scenario, h, d)
    approx = parametric.eval_array(coeffs, h[:, None], d[None, :])
    return (theo - approx) ** 2
