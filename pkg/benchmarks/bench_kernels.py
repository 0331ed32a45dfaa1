"""Time the compiled and NumPy kernel backends on representative workloads.

Run with ``python benchmarks/bench_kernels.py [--repeat 5]``.
"""

import argparse
import timeit

import numpy as np

from survext.kernels import backends


def workloads(rng):
    X = np.sort(rng.random((2000, 40)), axis=1)
    A = np.sort(rng.exponential(1.0, (1000, 100)), axis=1)
    B = np.sort(rng.exponential(0.5, (1000, 100)), axis=1)
    x = np.sort(rng.exponential(1.0, 100_000))
    y = np.sort(rng.exponential(0.5, 100_000))
    imgs = np.sort(rng.random((20, 784)), axis=1)
    cands = np.sort(rng.random((50, 784)), axis=1)
    return {
        "statistic_batch Tn (2000x40)": lambda k: k.statistic_batch("Tn", X, 0),
        "statistic_batch AD (2000x40)": lambda k: k.statistic_batch("AD", X, 0),
        "statistic_batch TB (2000x40)": lambda k: k.statistic_batch("TB", X, 7),
        "statistic_batch TU (2000x40)": lambda k: k.statistic_batch("TU", X, 7),
        "dsed_estimate_batch (1000x100)": lambda k: k.dsed_estimate_batch(A, B, 0.5),
        "dsed_estimate (n=1e5)": lambda k: k.dsed_estimate(x, y, 0.5),
        "cross_sum (n=1e5)": lambda k: k.cross_sum(x, y, -np.inf, True),
        "ratio_matrix (20x50, 784 px)": lambda k: k.ratio_matrix(imgs, cands),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    impls = backends()
    jobs = workloads(np.random.default_rng(0))
    names = list(impls)
    print(f"{'workload':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in jobs.items():
        times = []
        for n in names:
            k = impls[n]
            fn(k)  # warm up
            times.append(min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)))
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
