"""Compare the compiled and pure-Python kernels on the two hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per (kernel, backend) with the best wall time and the
speed-up of the compiled backend, and checks that both give the same result.
"""
import argparse
import time

import numpy as np

from trefoilflow.kernels import available_backends


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_dopri(mod, repeat):
    y0 = np.array([1.0, 1.0, 20.0])
    return _best(lambda: mod.dopri5_lorenz(y0, 10.0, 28.0, 8.0 / 3.0, 20.0, 1e-10, 0.0, None,
                                           0.0, 0.0, 2_000_000), repeat)


def bench_crossings(mod, repeat, n=4000, seed=0):
    rng = np.random.default_rng(seed)
    # a closed random walk, dense in crossings
    P = np.cumsum(rng.normal(size=(n, 2)), axis=0)
    P = np.vstack([P, P[:1]])
    return _best(lambda: mod.segment_crossings(np.ascontiguousarray(P), 1e-12), repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; only the pure-Python kernels are available")
    for name, bench in (("dopri5_lorenz", bench_dopri), ("segment_crossings", bench_crossings)):
        times, outs = {}, {}
        for b, mod in backends.items():
            times[b], outs[b] = bench(mod, args.repeat)
            print(f"{name:18s} {b:9s} {times[b]:9.4f} s")
        if "compiled" in times:
            a, c = outs["python"][1], outs["compiled"][1]
            # trajectories are chaotic: rounding differences in the step controller grow
            # like e^(0.9 t), so compare the final states loosely
            diff = float(np.max(np.abs(np.asarray(a, float)[-1] - np.asarray(c, float)[-1]))) \
                if len(a) == len(c) else float("nan")
            print(f"{name:18s} speed-up  {times['python'] / times['compiled']:9.1f}x"
                  f"  max |difference| in last output row: {diff:.2e}")


if __name__ == "__main__":
    main()
