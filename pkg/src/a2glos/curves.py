"""Probability curves: sampled maps from distance or elevation to P(LoS)."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatchError

DISTANCE = "distance-meters"
ELEVATION = "elevation-radians"

AXIS_HEADERS = {DISTANCE: "d_rx_m", ELEVATION: "theta_rad"}


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityCurve:
    """Immutable curve of LoS probability against one axis.

    ``metadata`` is a free-form mapping (scenario label, heights, source tag)
    written into CSV exports as ``#`` comment lines.
    """

    x: np.ndarray
    p: np.ndarray
    axis_kind: str = DISTANCE
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        x = _frozen(self.x)
        p = _frozen(self.p)
        if x.ndim != 1 or x.shape != p.shape:
            raise ValueError("x and p must be 1-D arrays of equal length")
        if x.size == 0:
            raise ValueError("a curve needs at least one point")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.axis_kind not in AXIS_HEADERS:
            raise ValueError(f"unknown axis kind {self.axis_kind!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self):
        return self.x.size

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.p.tolist()))

    @property
    def source(self) -> str | None:
        return self.metadata.get("source")

    def to_csv(self, path=None) -> str:
        """Write ``<axis>,p_los`` rows with six decimals; returns the text."""
        buf = io.StringIO()
        write_metadata(buf, self.metadata)
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([AXIS_HEADERS[self.axis_kind], "p_los"])
        for xi, pi in zip(self.x, self.p):
            writer.writerow([_fmt(xi), _fmt(pi)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path) -> ProbabilityCurve:
        metadata, header, rows = read_csv(path)
        kinds = {v: k for k, v in AXIS_HEADERS.items()}
        if len(header) < 2 or header[0] not in kinds:
            raise ValueError(f"{path}: unrecognized curve header {header!r}")
        x = [float(r[0]) for r in rows]
        p = [float(r[1]) for r in rows]
        return cls(x, p, axis_kind=kinds[header[0]], metadata=metadata)


def _fmt(value: float) -> str:
    text = f"{value:.6f}"
    # avoid "-0.000000" for tiny negative round-off
    return "0.000000" if text == "-0.000000" else text


def write_metadata(buf, metadata: dict) -> None:
    for key, value in metadata.items():
        buf.write(f"# {key}: {value}\n")


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Split a commented CSV file into (metadata, header, rows)."""
    metadata = {}
    lines = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
        elif line.strip():
            lines.append(line)
    if not lines:
        raise ValueError(f"{path}: no CSV header")
    reader = csv.reader(lines)
    header = next(reader)
    return metadata, header, list(reader)


def _check_same_grid(a: ProbabilityCurve, b: ProbabilityCurve) -> None:
    if a.axis_kind != b.axis_kind:
        raise GridMismatchError(f"axis kinds differ: {a.axis_kind} vs {b.axis_kind}")
    if a.x.shape != b.x.shape or not np.array_equal(a.x, b.x):
        raise GridMismatchError("curves are sampled on different grids")


def max_abs_gap(a: ProbabilityCurve, b: ProbabilityCurve) -> float:
    """Largest pointwise |p_a - p_b| over a shared grid."""
    _check_same_grid(a, b)
    return float(np.max(np.abs(a.p - b.p)))


def mean_squared_gap(a: ProbabilityCurve, b: ProbabilityCurve) -> float:
    _check_same_grid(a, b)
    return float(np.mean((a.p - b.p) ** 2))


def merged_csv(
    theoretical: ProbabilityCurve | None = None,
    parametric: ProbabilityCurve | None = None,
    simulated: ProbabilityCurve | None = None,
    metadata: dict | None = None,
    path=None,
) -> str:
    """Join up to three curves on a common grid into one comparison table.

    Missing sources are written as empty cells.
    """
    curves = [c for c in (theoretical, parametric, simulated) if c is not None]
    if not curves:
        raise ValueError("nothing to merge")
    for other in curves[1:]:
        _check_same_grid(curves[0], other)
    buf = io.StringIO()
    write_metadata(buf, metadata or {})
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "p_theoretical", "p_parametric", "p_simulated"])
    for k, xk in enumerate(curves[0].x):
        row = [_fmt(xk)]
        for c in (theoretical, parametric, simulated):
            row.append("" if c is None else _fmt(c.p[k]))
        writer.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
