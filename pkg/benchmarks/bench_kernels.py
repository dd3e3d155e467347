"""Benchmark the hot kernels: jitted backend vs the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Set CHOICEWELFARE_BACKEND=numpy to time the fallback dispatch alone.
"""

import numpy as np
from time import perf_counter

from choicewelfare._kernels import (
    active_backend,
    argmax_tally_numpy,
    logit_welfare_curve_numpy,
    warm_up,
)

N_RUNS = 7


def time_fn(fn, *args, n_runs=N_RUNS):
    times = []
    for _ in range(n_runs):
        start = perf_counter()
        fn(*args)
        times.append(perf_counter() - start)
    times = np.array(times) * 1e3
    return times.mean(), times.std(), times.min()


def report(label, numpy_stats, numba_stats=None):
    mean, std, best = numpy_stats
    print(f"{label}")
    print(f"  numpy : mean {mean:8.3f} ms  std {std:7.3f} ms  min {best:8.3f} ms")
    if numba_stats is not None:
        jmean, jstd, jbest = numba_stats
        print(
            f"  numba : mean {jmean:8.3f} ms  std {jstd:7.3f} ms  min {jbest:8.3f} ms"
        )
        print(f"  speedup (mean numpy / mean numba): {mean / jmean:.2f}x")
    print()


def main():
    backend = active_backend()
    print(f"active backend: {backend}")
    if backend == "numba":
        from choicewelfare._kernels import argmax_tally_numba, logit_welfare_curve_numba

        warm_up()  # compile outside the timed region
    else:
        argmax_tally_numba = logit_welfare_curve_numba = None
        print("numba backend inactive; timing the numpy fallback only")
    print()

    rng = np.random.default_rng(0)

    # Small problem shaped like the bundled three-store sweep.
    weights_s = np.full(3, 1.0 / 3.0)
    utilities_s = rng.normal(size=(3, 3))
    q_small = np.linspace(0.0, 10.0, 201)

    # Larger population and a denser grid.
    t_large, k_large = 50, 12
    weights_l = rng.dirichlet(np.ones(t_large))
    utilities_l = rng.normal(size=(t_large, k_large))
    q_large = np.linspace(0.0, 10.0, 400)

    # Monte Carlo tally: one million draws over four actions.
    tally_utils = rng.normal(size=4)
    tally_errors = rng.gumbel(size=(1_000_000, 4))

    cases = [
        ("logit_welfare_curve 3x3 types/actions, 201 q values",
         logit_welfare_curve_numpy, logit_welfare_curve_numba,
         (weights_s, utilities_s, q_small)),
        (f"logit_welfare_curve {t_large}x{k_large}, 400 q values",
         logit_welfare_curve_numpy, logit_welfare_curve_numba,
         (weights_l, utilities_l, q_large)),
        ("argmax_tally 1,000,000 draws x 4 actions",
         argmax_tally_numpy, argmax_tally_numba,
         (tally_utils, tally_errors)),
    ]

    for label, numpy_fn, numba_fn, args in cases:
        if numba_fn is not None:
            gap = np.max(
                np.abs(
                    np.asarray(numpy_fn(*args), dtype=np.float64)
                    - np.asarray(numba_fn(*args), dtype=np.float64)
                )
            )
            label = f"{label}  (backend max |diff| {gap:.2e})"
            numba_stats = time_fn(numba_fn, *args)
        else:
            numba_stats = None
        report(label, time_fn(numpy_fn, *args), numba_stats)


if __name__ == "__main__":
    main()
