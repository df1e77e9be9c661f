"""Timing comparison of the JIT and pure-numpy kernel backends.

Both backends are called directly (ignoring the QCPD_BACKEND selection), the
outputs are asserted bit-identical, and wall times are printed side by side.

Usage:
    python benchmarks/bench_backends.py [--trials 2000000] [--n 31] [--c 0.4]
                                        [--profile-n 4000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from qcpd import kernels
from qcpd.online_opt import best_online


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _row(label: str, numpy_s: float, numba_s: float) -> str:
    speedup = numpy_s / numba_s if numba_s > 0 else float("inf")
    return f"{label:<28} {numpy_s * 1e3:>10.2f} {numba_s * 1e3:>10.2f} {speedup:>9.1f}x"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--trials", type=int, default=2_000_000)
    parser.add_argument("--n", type=int, default=31)
    parser.add_argument("--c", type=float, default=0.4)
    parser.add_argument(
        "--profile-n", type=int, default=4_000,
        help="chain length for the detection-profile benchmark",
    )
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    if not kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1

    xs_sim = best_online(args.n, args.c).schedule.as_array()
    rng = np.random.default_rng(args.seed)
    c_prof = 0.35
    xs_prof = rng.uniform(c_prof, 1.0 / c_prof, size=args.profile_n - 1)

    # correctness first: both backends must emit identical bits
    prof_np = kernels.detection_profile_numpy(c_prof, xs_prof)
    prof_nb = kernels.detection_profile_numba(c_prof, xs_prof)
    assert np.array_equal(prof_np, prof_nb), "profile backends disagree"
    counts_np = kernels.simulate_counts_numpy(args.c, xs_sim, args.trials, args.seed)
    counts_nb = kernels.simulate_counts_numba(args.c, xs_sim, args.trials, args.seed)
    assert np.array_equal(counts_np[0], counts_nb[0]), "simulation backends disagree"
    assert counts_np[1] == counts_nb[1] == 0

    t_prof_np = _time(
        lambda: kernels.detection_profile_numpy(c_prof, xs_prof), args.repeat
    )
    t_prof_nb = _time(
        lambda: kernels.detection_profile_numba(c_prof, xs_prof), args.repeat
    )
    t_sim_np = _time(
        lambda: kernels.simulate_counts_numpy(args.c, xs_sim, args.trials, args.seed),
        args.repeat,
    )
    t_sim_nb = _time(
        lambda: kernels.simulate_counts_numba(args.c, xs_sim, args.trials, args.seed),
        args.repeat,
    )

    print(f"outputs bit-identical; best of {args.repeat} runs")
    print(f"{'kernel':<28} {'numpy ms':>10} {'numba ms':>10} {'speedup':>10}")
    print(_row(f"detection_profile n={args.profile_n}", t_prof_np, t_prof_nb))
    print(_row(f"simulate_counts {args.trials} trials", t_sim_np, t_sim_nb))
    return 0


if __name__ == "__main__":
    sys.exit(main())
