"""Compare the compiled and pure-Python occlusion kernels.

    python3 benchmarks/bench_kernels.py --trials 20000
"""
import argparse
import time

import numpy as np

from a2glos import _pykernels
from a2glos.scenario import preset

try:
    from a2glos import _kernels
except ImportError:
    _kernels = None


def workload(trials, seed, layout):
    sc = preset("urban")
    rng = np.random.default_rng(seed)
    d = 500.0
    phi = rng.uniform(0, 2 * np.pi, trials)
    keys = rng.integers(0, 2**64, trials, dtype=np.uint64)
    if layout == "manhattan":
        big = _pykernels.UNBOUNDED
        off = rng.uniform(-sc.pitch, 0, (2, trials))
        return (30.0, d * np.cos(phi), d * np.sin(phi), 2.0, off[0], off[1], keys,
                sc.pitch, sc.width, sc.gamma, -big, big, -big, big)
    n_b = int(d * np.sqrt(sc.alpha * sc.beta) / 1000)
    step = d / n_b
    return (30.0, np.full(trials, d), np.zeros(trials), 2.0, np.full(trials, step / 2 - sc.width / 2),
            np.full(trials, -sc.width / 2), keys, step, sc.width, sc.gamma, 0, n_b - 1, 0, 0)


def timed(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'layout':<10} {'backend':<9} {'seconds':>9} {'trials/s':>12} {'speedup':>8}")
    for layout in ("transect", "manhattan"):
        work = workload(args.trials, args.seed, layout)
        t_py, ref = timed(_pykernels.trace_batch, work, args.repeat)
        print(f"{layout:<10} {'python':<9} {t_py:>9.4f} {args.trials / t_py:>12.0f} {1.0:>8.1f}")
        if _kernels is None:
            print(f"{layout:<10} {'compiled':<9} {'n/a (extension not built)':>31}")
            continue
        t_c, out = timed(_kernels.trace_batch, work, args.repeat)
        if not np.array_equal(out, ref):
            raise SystemExit("backends disagree")
        print(f"{layout:<10} {'compiled':<9} {t_c:>9.4f} {args.trials / t_c:>12.0f} {t_py / t_c:>8.1f}")


if __name__ == "__main__":
    main()
