"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--length 25000] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from mts_oracle import _kernels_py
from mts_oracle.bench import gen_coupon_collector_caching

try:
    from mts_oracle import _ckernels
except ImportError:
    _ckernels = None


def cases(length):
    reqs = np.asarray(gen_coupon_collector_caching(100, length, seed=0).requests, dtype=np.int64)
    # Citi-like skew: a few hundred pages, Zipf popularity
    rng = np.random.default_rng(1)
    skewed = (rng.zipf(1.3, size=length) % 600).astype(np.int64)
    keys = _kernels_py.next_arrivals(skewed)
    batch = rng.integers(0, 5, size=(2000, 12)).astype(np.int64)
    return {
        "furthest_schedule k=100": lambda m: m.furthest_schedule(skewed, keys, 100),
        "lru_schedule k=100": lambda m: m.lru_schedule(reqs, 100),
        "pleco_predictions": lambda m: m.pleco_predictions(skewed[: length // 5]),
        "belady_faults_batch 2000x12 k=3": lambda m: m.belady_faults_batch(batch, 3),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=25_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':<34}" + "".join(f"{name:>12}" for name, _ in backends) + ("    speedup" if _ckernels else ""))
    for label, fn in cases(args.length).items():
        times = [min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for _, mod in backends]
        row = f"{label:<34}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
