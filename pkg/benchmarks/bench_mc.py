"""Throughput of the compound-sum sampler: numba kernel vs numpy fallback.

    python benchmarks/bench_mc.py --samples 200000 --repeat 3

Both backends consume the same uniforms, so the script also reports the
largest relative difference between their outputs.
"""

import argparse
import time

import numpy as np

from tailsum import _accel
from tailsum.frequency import Deterministic, Poisson
from tailsum.montecarlo import compound_samples
from tailsum.severity import Levy, Lognormal, Pareto

CASES = [
    ("pareto a=1.2 / poisson 100", Pareto(1.2), Poisson(100.0)),
    ("lognormal s=2 / poisson 100", Lognormal(2.0), Poisson(100.0)),
    ("levy c=1 / deterministic 100", Levy(1.0), Deterministic(100)),
]


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--chunks", type=int, default=1)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    backends = ["numpy"]
    if _accel.USE_NUMBA:
        backends.insert(0, "numba")
        # compile outside the timed region
        compound_samples(Pareto(2.0), Poisson(3.0), 10, 0, backend="numba")
    else:
        print("numba disabled or missing: timing the numpy path only")

    print(f"{'case':32s} {'backend':8s} {'seconds':>9s} {'Mdraws/s':>9s}")
    for name, sev, freq in CASES:
        draws = args.samples * freq.mean
        outs = {}
        for b in backends:
            t, outs[b] = best_time(
                lambda: compound_samples(sev, freq, args.samples, args.seed, args.chunks, backend=b),
                args.repeat,
            )
            print(f"{name:32s} {b:8s} {t:9.3f} {draws / t / 1e6:9.1f}")
        if len(outs) == 2:
            diff = np.max(np.abs(outs["numba"] / outs["numpy"] - 1.0))
            print(f"{'':32s} max rel diff {diff:.2e}")


if __name__ == "__main__":
    main()
