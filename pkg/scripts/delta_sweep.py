#!/usr/bin/env python3
"""Sweep settings and series lengths, printing the VCDF-minus-base F1 deltas.

Useful for eyeballing how much the stability filter buys on each benchmark
setting before committing to a preset grid.

Usage: python3 scripts/delta_sweep.py [--realizations 10] [--seed 0] [--n 15]
"""

from __future__ import annotations

import argparse
import sys
import time

from vcdf import (
    DiscovererConfig,
    VcdfConfig,
    aggregate,
    benchmark_suite,
    make_discoverer,
    run_vcdf,
    summary_f1,
    window_f1,
)

SETTINGS = ("linear", "nonlinear", "non_gaussian", "trended")
LENGTHS = (250, 1000, 2000)


def sweep(setting: str, T: int, n: int, realizations: int, seed: int, method: str) -> dict:
    suite = benchmark_suite(setting, n, T, realizations, seed)
    base = make_discoverer(method, DiscovererConfig())
    base_w, base_s, vcdf_w, vcdf_s = [], [], [], []
    t_base = t_vcdf = 0.0
    for ds in suite:
        t0 = time.perf_counter()
        g0 = base.discover(ds.series)
        t1 = time.perf_counter()
        filtered, _ = run_vcdf(ds.series, base, VcdfConfig())
        t2 = time.perf_counter()
        t_base += t1 - t0
        t_vcdf += t2 - t1
        base_w.append(window_f1(g0, ds.truth))
        base_s.append(summary_f1(g0, ds.truth))
        vcdf_w.append(window_f1(filtered, ds.truth))
        vcdf_s.append(summary_f1(filtered, ds.truth))
    return {
        "base_w": aggregate(base_w),
        "base_s": aggregate(base_s),
        "vcdf_w": aggregate(vcdf_w),
        "vcdf_s": aggregate(vcdf_s),
        "ratio": t_vcdf / t_base if t_base else float("nan"),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--realizations", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=15)
    parser.add_argument("--method", default="varlingam")
    parser.add_argument("--settings", nargs="*", default=list(SETTINGS))
    parser.add_argument("--lengths", nargs="*", type=int, default=list(LENGTHS))
    args = parser.parse_args(argv)

    print(f"method={args.method} n={args.n} realizations={args.realizations} seed={args.seed}")
    header = f"{'setting':>13} {'T':>5} | {'base w':>7} {'vcdf w':>7} {'d_w':>6} | {'base s':>7} {'vcdf s':>7} {'d_s':>6} | ratio"
    print(header)
    print("-" * len(header))
    for setting in args.settings:
        for T in args.lengths:
            r = sweep(setting, T, args.n, args.realizations, args.seed, args.method)
            d_w = r["vcdf_w"].f1_mean - r["base_w"].f1_mean
            d_s = r["vcdf_s"].f1_mean - r["base_s"].f1_mean
            print(
                f"{setting:>13} {T:>5} | {r['base_w'].f1_mean:>7.3f} {r['vcdf_w'].f1_mean:>7.3f} {d_w:>+6.3f}"
                f" | {r['base_s'].f1_mean:>7.3f} {r['vcdf_s'].f1_mean:>7.3f} {d_s:>+6.3f}"
                f" | {r['ratio']:>5.1f}"
            )
    return 0


if __name__ == "__main__":
    sys.exit(main())
