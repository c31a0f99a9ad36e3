"""Time the compiled inner loops against their numpy fallbacks.

Run ``python benchmarks/bench_core.py``; each line reports the best of
``--repeat`` runs for both backends and checks that they agree.
"""
import argparse
import time

import numpy as np

from heatba import _backend, _pycore

try:
    from heatba import _core
except ImportError:  # extension not built
    _core = None


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n):
    rng = np.random.default_rng(0)
    vals = rng.normal(size=n) + 1j * rng.normal(size=n)
    # every dyadic length, every start with stride 4
    lo, hi = [], []
    length = 2
    while length < n:
        starts = np.arange(0, n - length, 4)
        lo.append(starts)
        hi.append(starts + length)
        length *= 2
    lo = np.concatenate(lo).astype(np.int64)
    hi = np.concatenate(hi).astype(np.int64)
    xs = np.linspace(-3, 3, 512)
    offsets = np.linspace(-10, 10, 2561)
    kw = np.stack([np.exp(-offsets ** 2), -2 * offsets * np.exp(-offsets ** 2)]).astype(np.complex128)
    return {
        "interval_oscillation": (vals, lo, hi),
        "besov_rows": (vals, 1.0 / n, 2.0, 0),
        "besov_rows p=3": (vals, 1.0 / n, 3.0, 0),
        "pl_convolve": (vals.real.copy(), vals.imag.copy(), -8.0, 16.0 / (n - 1), 0, xs, 0.1, offsets, kw),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2049, help="samples per input")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled core not built; nothing to compare")
        return 1
    print(f"default backend: {_backend.NAME}; n = {args.n}")
    print(f"{'kernel':<22}{'cython [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, call in cases(args.n).items():
        fn = name.split()[0]
        tc, a = best_of(getattr(_core, fn), call, args.repeat)
        tp, b = best_of(getattr(_pycore, fn), call, args.repeat)
        pairs = zip(a, b) if isinstance(a, tuple) else [(a, b)]
        diff = max(float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300))) for x, y in pairs)
        print(f"{name:<22}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}{diff:>15.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
