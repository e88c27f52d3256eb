"""Time the compiled and pure-Python kernels on identical inputs.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case is timed with ``timeit`` (best of ``--repeat``), once per
available backend, and the speedup of the compiled kernels is reported.
"""

import argparse
import json
import platform
import timeit

import numpy as np

from ordlasso import _backend
from ordlasso.solver import Dataset, FitConfig, center, fit_ordered_lasso
from ordlasso.timelag import LagSpec, build_rolling_design, fit_static


def _cases(rng):
    y1k, w1k = rng.normal(size=1000), np.ones(1000)
    y10k, w10k = rng.normal(size=10_000), np.ones(10_000)
    X = rng.normal(size=(200, 20))
    data = center(Dataset(X, X @ np.linspace(2, 0, 20) + rng.normal(size=200)))
    series = rng.normal(size=(300, 3))
    design, ys = build_rolling_design(series, LagSpec(3, 10), series[:, 0])
    lagged = center(Dataset(design.Z, ys))

    def k():
        return _backend.kernels()

    return {
        "pava n=1000": lambda: k().pava_noninc(y1k, w1k),
        "pava n=10000": lambda: k().pava_noninc(y10k, w10k),
        "near-iso n=1000": lambda: k().near_iso_noninc(y1k, w1k, 0.5),
        "prox n=1000": lambda: k().prox(y1k, 0.1, w1k, np.inf, True),
        "solve p=20 N=200": lambda: fit_ordered_lasso(data, FitConfig(5.0)),
        "blockwise 3x10": lambda: fit_static(lagged, 10, FitConfig(5.0)),
    }


def run(repeat=5, seed=0):
    cases = _cases(np.random.default_rng(seed))
    results = {}
    for name in _backend.available_backends():
        with _backend.use_backend(name):
            for case, fn in cases.items():
                number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
                best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
                results.setdefault(case, {})[name] = best
    return results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", help="also write the timings here")
    args = parser.parse_args(argv)
    results = run(args.repeat, args.seed)
    backends = _backend.available_backends()
    print(f"python {platform.python_version()}, backends: {', '.join(backends)}")
    print(f"{'case':<20}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for case, row in results.items():
        line = f"{case:<20}" + "".join(f"{row[b] * 1e3:>12.3f}ms" for b in backends)
        if "cython" in row:
            line += f"{row['python'] / row['cython']:>9.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"seconds": results, "backends": backends}, fh, indent=2)


if __name__ == "__main__":
    main()
