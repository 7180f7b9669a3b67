"""Command-line interface.

Every command writes plot-ready CSV (to ``--out`` or stdout) with the
resolved configuration as leading ``#`` comment lines.  Exit status is 0 on
success, 1 for usage errors and 2 for numerical or fit failures.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import fitting, fresnel, geosim, parametric
from .curves import DISTANCE, ELEVATION, ProbabilityCurve, max_abs_gap, mean_squared_gap, merged_csv, read_csv
from .errors import DomainError, FitError, GridMismatchError
from .parametric import ParametricCoeffs, table2_preset
from .scenario import ScenarioPreset, resolve_scenario, write_key_values
from .theoretical import los_probability_curve

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

# default envelope: distances 0-1000 m, receiver 2 m
DEFAULT_D_MIN, DEFAULT_D_MAX, DEFAULT_D_STEP = 0.0, 1000.0, 10.0
DEFAULT_H_RX = 2.0
DEFAULT_H_TX = 100.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0:
        raise UsageError("grid step must be positive")
    if stop < start:
        raise UsageError("grid stop must not be below its start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, step = (float(v) for v in spec.split(":"))
            return _grid(start, stop, step)
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError:
        raise UsageError(f"bad grid spec {spec!r}; use start:stop:step or a,b,c") from None


def _distances(args, default=(DEFAULT_D_MIN, DEFAULT_D_MAX, DEFAULT_D_STEP)) -> np.ndarray:
    d_min = default[0] if args.d_min is None else args.d_min
    d_max = default[1] if args.d_max is None else args.d_max
    d_step = default[2] if args.d_step is None else args.d_step
    if d_min < 0:
        raise UsageError("distances must be non-negative")
    return _grid(d_min, d_max, d_step)


def _thetas(args) -> np.ndarray:
    deg = _grid(args.theta_min, args.theta_max, args.theta_step)
    if deg[0] <= 0 or deg[-1] > 90:
        raise UsageError("elevation angles must lie in (0, 90] degrees")
    return np.radians(deg)


def _scenario(args):
    try:
        return resolve_scenario(args.scenario)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _coeffs(args) -> ParametricCoeffs:
    if args.coeffs:
        return ParametricCoeffs.load(args.coeffs)
    try:
        return table2_preset(args.scenario)
    except KeyError:
        raise UsageError("custom scenarios need --coeffs for the parametric model") from None


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _with_header(meta: dict, text: str) -> str:
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    return "\n".join(lines) + ("\n" if lines else "") + text


def _config(args, *keys) -> dict:
    meta = {"command": args.command}
    for key in keys:
        value = getattr(args, key)
        if value is not None:
            meta[key] = value
    return meta


# --- commands -------------------------------------------------------------

def cmd_presets(args) -> int:
    out = ["# environment parameters",
           "scenario alpha beta gamma W_m S_m"]
    for p in ScenarioPreset:
        sc = p.scenario()
        out.append(f"{p.slug} {sc.alpha:g} {sc.beta:g} {sc.gamma:g} {sc.width:.2f} {sc.spacing:.2f}")
    out += ["", "# parametric model coefficients", "scenario a1 b1 c1 a2 b2"]
    for p in ScenarioPreset:
        c = table2_preset(p)
        out.append(f"{p.slug} {c.a1:g} {c.b1:g} {c.c1:g} {c.a2:g} {c.b2:g}")
    out += ["", "# note: dense-urban and high-rise-urban share identical environment parameters"]
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    sc = _scenario(args)
    curve = los_probability_curve(args.h_tx, args.h_rx, _distances(args), sc, width=args.width)
    meta = _config(args, "scenario", "h_tx", "h_rx", "width")
    meta.update(source="theoretical", alpha=sc.alpha, beta=sc.beta, gamma=sc.gamma)
    _emit(_with_header(meta, _strip_meta(curve.to_csv())), args.out)
    return EXIT_OK


def _strip_meta(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def _parametric_curve(args, coeffs) -> ProbabilityCurve:
    h_prime = args.h_tx - args.h_rx
    if not h_prime > 0:
        raise UsageError("the parametric model needs h_tx > h_rx")
    if args.axis == "elevation":
        return parametric.elevation_curve(coeffs, h_prime, _thetas(args))
    return parametric.curve(coeffs, h_prime, _distances(args))


def cmd_eval_param(args) -> int:
    coeffs = _coeffs(args)
    curve = _parametric_curve(args, coeffs)
    meta = _config(args, "scenario", "coeffs", "h_tx", "h_rx", "axis")
    meta.update(source="parametric", h_prime=args.h_tx - args.h_rx, a1=coeffs.a1, b1=coeffs.b1, c1=coeffs.c1, a2=coeffs.a2, b2=coeffs.b2)
    _emit(_with_header(meta, _strip_meta(curve.to_csv())), args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    sc = _scenario(args)
    h_grid = parse_grid(args.h_prime_grid) if args.h_prime_grid else fitting.DEFAULT_H_PRIME_GRID
    if args.d_min is None and args.d_max is None and args.d_step is None:
        d_grid = fitting.DEFAULT_D_RX_GRID
    else:
        d_grid = _distances(args, default=(10.0, 1000.0, 10.0))
    config = fitting.FitConfig(sc, tuple(h_grid), tuple(d_grid), args.tolerance, args.max_iterations)
    result = fitting.fit_scenario(config)
    meta = _config(args, "scenario", "h_prime_grid", "d_min", "d_max", "d_step", "tolerance", "max_iterations")
    c = result.coeffs
    coeff_values = {k: repr(v) for k, v in zip(("a1", "b1", "c1", "a2", "b2"), c.as_tuple())}
    coeff_values["scenario"] = sc.label
    coeff_values["final_mse"] = repr(result.final_mse)
    coeff_values["max_gap"] = repr(result.max_gap)
    if args.out:
        write_key_values(args.out, coeff_values)
    else:
        sys.stdout.write("".join(f"{k} = {v}\n" for k, v in coeff_values.items()))
    report = result.report_csv(metadata=meta)
    if args.report:
        Path(args.report).write_text(report)
    return EXIT_OK


def _sim_config(args, sc, distances) -> geosim.SimConfig:
    azimuths = ()
    policy = geosim.UNIFORM_AZIMUTH
    if args.azimuths:
        azimuths = tuple(math.radians(a) for a in parse_grid(args.azimuths))
        policy = geosim.FIXED_AZIMUTH
    return geosim.SimConfig(
        sc, args.h_tx, args.h_rx, tuple(distances), args.trials, args.seed,
        azimuth_policy=policy, azimuths=azimuths, layout=args.layout, frozen_city=args.frozen_city,
    )


def _simulate(args, sc):
    """Run the simulator; returns (axis values, axis kind, estimates, config)."""
    if args.axis == "elevation":
        thetas = _thetas(args)
        h_prime = args.h_tx - args.h_rx
        if not h_prime > 0:
            raise UsageError("an elevation sweep needs h_tx > h_rx")
        # ascending angle means descending distance; simulate in distance order
        distances = parametric.elevation_to_distance(h_prime, thetas)
        cfg = _sim_config(args, sc, distances)
        return thetas, ELEVATION, geosim.estimate_curve(cfg, threads=args.threads), cfg
    distances = _distances(args)
    cfg = _sim_config(args, sc, distances)
    return distances, DISTANCE, geosim.estimate_curve(cfg, threads=args.threads), cfg


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    xs, kind, estimates, cfg = _simulate(args, sc)
    meta = {"command": args.command, **cfg.metadata(), "axis": args.axis,
            "frequency_hz": 28e9, "bandwidth_hz": 500e6}
    header = "theta_rad" if kind == ELEVATION else "d_rx_m"
    text = geosim.estimates_to_csv(estimates, meta, x_header=header, xs=xs)
    _emit(text, args.out)
    if args.out:
        write_key_values(str(args.out) + ".meta", meta)
    return EXIT_OK


def _load_curve(path) -> ProbabilityCurve:
    metadata, header, rows = read_csv(path)
    kinds = {"d_rx_m": DISTANCE, "theta_rad": ELEVATION, "x": DISTANCE}
    if not header or header[0] not in kinds:
        raise UsageError(f"{path}: unrecognized CSV header {header!r}")
    x = [float(r[0]) for r in rows]
    p = [float(r[1]) for r in rows]
    return ProbabilityCurve(x, p, kinds[header[0]], metadata)


def _compare_surface(args, sc) -> int:
    coeffs = _coeffs(args)
    h_grid = parse_grid(args.h_prime_grid)
    d_grid = _distances(args, default=(10.0, 1000.0, 10.0))
    theo = fitting.theoretical_surface(sc, h_grid, d_grid)
    approx = parametric.eval_array(coeffs, h_grid[:, None], d_grid[None, :])
    sq = (theo - approx) ** 2
    gap = float(np.sqrt(sq.max()))
    mse = float(sq.mean())
    meta = _config(args, "scenario", "coeffs", "h_prime_grid", "d_min", "d_max", "d_step")
    meta.update(convention="h_rx = 0, h_tx = h_prime", max_abs_gap=f"{gap:.6f}", mse=f"{mse:.9f}")
    lines = ["h_prime_m,d_rx_m,p_theoretical,p_parametric,sq_error"]
    for i, h in enumerate(h_grid):
        for j, d in enumerate(d_grid):
            lines.append(f"{h:.6f},{d:.6f},{theo[i, j]:.6f},{approx[i, j]:.6f},{sq[i, j]:.9f}")
    _emit(_with_header(meta, "\n".join(lines) + "\n"), args.out)
    print(f"max_abs_gap {gap:.6f} mse {mse:.9f}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.inputs:
        if not 2 <= len(args.inputs) <= 3:
            raise UsageError("--inputs takes two or three CSV files")
        curves = [_load_curve(p) for p in args.inputs]
        slots = {"theoretical": None, "parametric": None, "simulated": None}
        for c in curves:
            tag = c.metadata.get("source")
            if tag in slots and slots[tag] is None:
                slots[tag] = c
            else:
                free = next(k for k, v in slots.items() if v is None)
                slots[free] = c
        meta = {"command": "compare", "inputs": " ".join(map(str, args.inputs))}
    else:
        sc = _scenario(args)
        if args.h_prime_grid:
            return _compare_surface(args, sc)
        sources = [s.strip() for s in args.sources.split(",")]
        unknown = set(sources) - {"theoretical", "parametric", "simulated"}
        if unknown or not 2 <= len(sources) <= 3:
            raise UsageError("--sources must name two or three of theoretical,parametric,simulated")
        slots = {"theoretical": None, "parametric": None, "simulated": None}
        if args.axis == "elevation":
            xs = _thetas(args)
            distances = parametric.elevation_to_distance(args.h_tx - args.h_rx, xs)
            kind = ELEVATION
        else:
            xs = distances = _distances(args)
            kind = DISTANCE
        if "theoretical" in sources:
            th = los_probability_curve(args.h_tx, args.h_rx, distances, sc)
            slots["theoretical"] = ProbabilityCurve(xs, th.p, kind, th.metadata)
        if "parametric" in sources:
            slots["parametric"] = _parametric_curve(args, _coeffs(args))
        if "simulated" in sources:
            _, _, estimates, cfg = _simulate(args, sc)
            slots["simulated"] = ProbabilityCurve(xs, [e.p_los_hat for e in estimates], kind, {"source": "simulated"})
        meta = _config(args, "scenario", "coeffs", "h_tx", "h_rx", "axis", "sources")
        if "simulated" in sources:
            meta.update(trials=args.trials, seed=args.seed, layout=args.layout)

    present = [(k, c) for k, c in slots.items() if c is not None]
    summary = []
    for i in range(len(present)):
        for j in range(i + 1, len(present)):
            (na, a), (nb, b) = present[i], present[j]
            gap, mse = max_abs_gap(a, b), mean_squared_gap(a, b)
            meta[f"max_abs_gap[{na}-{nb}]"] = f"{gap:.6f}"
            meta[f"mse[{na}-{nb}]"] = f"{mse:.9f}"
            summary.append(f"{na} vs {nb}: max_abs_gap {gap:.6f} mse {mse:.9f}")
    _emit(merged_csv(slots["theoretical"], slots["parametric"], slots["simulated"], meta), args.out)
    for line in summary:
        print(line, file=sys.stderr)
    return EXIT_OK


def cmd_fresnel(args) -> int:
    prof = fresnel.profile(args.frequency, args.distance, args.samples)
    width = 2 * prof.radius.max()
    text = prof.to_csv()
    header = (f"# command: fresnel\n# samples: {args.samples}\n# max_width_m: {width:.6f}\n"
              f"# max_link_for_2.5m_width_m: {fresnel.max_distance_for_width(args.frequency, 2.5):.3f}\n")
    _emit(header + text, args.out)
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def _add_geometry(p, h_tx=DEFAULT_H_TX):
    p.add_argument("--scenario", default="suburban",
                   help="preset name (suburban, urban, dense-urban, high-rise-urban) or key-value file (default: %(default)s)")
    p.add_argument("--h-tx", type=float, default=h_tx, help="transmitter height in m (default: %(default)s)")
    p.add_argument("--h-rx", type=float, default=DEFAULT_H_RX, help="receiver height in m (default: %(default)s)")


def _add_distance_grid(p, defaults=(DEFAULT_D_MIN, DEFAULT_D_MAX, DEFAULT_D_STEP)):
    p.add_argument("--d", dest="d_single", type=float, default=None, help="evaluate one distance only")
    p.add_argument("--d-min", type=float, default=None, help=f"first distance in m (default: {defaults[0]:g})")
    p.add_argument("--d-max", type=float, default=None, help=f"last distance in m (default: {defaults[1]:g})")
    p.add_argument("--d-step", type=float, default=None, help=f"distance step in m (default: {defaults[2]:g})")


def _add_axis(p):
    p.add_argument("--axis", choices=("distance", "elevation"), default="distance")
    p.add_argument("--theta-min", type=float, default=10.0, help="first elevation in degrees (default: %(default)s)")
    p.add_argument("--theta-max", type=float, default=80.0, help="last elevation in degrees (default: %(default)s)")
    p.add_argument("--theta-step", type=float, default=5.0, help="elevation step in degrees (default: %(default)s)")


def _add_sim(p):
    p.add_argument("--trials", type=int, default=10_000, help="trials per distance (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed (default: %(default)s)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    p.add_argument("--layout", choices=(geosim.TRANSECT, geosim.MANHATTAN), default=geosim.TRANSECT)
    p.add_argument("--frozen-city", action="store_true", help="one sampled city for all trials (manhattan only)")
    p.add_argument("--azimuths", default=None, help="fixed azimuth list in degrees, e.g. 0,45,90")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="a2glos", description="Air-to-ground LoS probability models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("presets", help="print the scenario and coefficient tables")
    p.add_argument("--out")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("eval", help="theoretical product-model curve")
    _add_geometry(p)
    _add_distance_grid(p)
    p.add_argument("--width", type=float, default=None, help="override the building width in m")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("eval-param", help="parametric-model curve")
    _add_geometry(p)
    _add_distance_grid(p)
    _add_axis(p)
    p.add_argument("--coeffs", help="coefficient file (default: the scenario's published row)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval_param)

    p = sub.add_parser("fit", help="fit parametric coefficients to the theoretical model")
    p.add_argument("--scenario", default="suburban")
    p.add_argument("--h-prime-grid", default=None, help="heights above receiver, start:stop:step (default: 10:500:10)")
    _add_distance_grid(p, defaults=(10.0, 1000.0, 10.0))
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--max-iterations", type=int, default=4000)
    p.add_argument("--out", help="coefficient file to write (default: stdout)")
    p.add_argument("--report", help="per-height fit report CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte Carlo LoS estimate")
    _add_geometry(p)
    _add_distance_grid(p)
    _add_axis(p)
    _add_sim(p)
    p.add_argument("--out", help="CSV path; a .meta sidecar is written next to it")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="compare theoretical, parametric and simulated curves")
    _add_geometry(p)
    _add_distance_grid(p)
    _add_axis(p)
    _add_sim(p)
    p.add_argument("--coeffs")
    p.add_argument("--sources", default="theoretical,parametric")
    p.add_argument("--h-prime-grid", default=None,
                   help="compare theoretical and parametric surfaces over these heights (h_rx = 0)")
    p.add_argument("--inputs", nargs="+", help="compare two or three existing curve CSV files")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fresnel", help="first Fresnel zone profile")
    p.add_argument("--frequency", type=float, default=28e9, help="Hz (default: %(default)g)")
    p.add_argument("--distance", type=float, default=500.0, help="link length in m (default: %(default)s)")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fresnel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "d_single", None) is not None:
        args.d_min = args.d_max = args.d_single
        args.d_step = 1.0
    try:
        return args.func(args)
    except (FitError, FloatingPointError) as exc:
        print(f"a2glos {args.command}: fit failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, GridMismatchError, ValueError, OSError) as exc:
        print(f"a2glos {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
