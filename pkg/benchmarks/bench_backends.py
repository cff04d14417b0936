#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the hot paths at a configurable size and reports the speedup plus
the worst cross-backend deviation (integer paths must agree exactly,
transcendental paths to ~1e-12).

    python benchmarks/bench_backends.py [--n 1000000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from ergolab import backend
from ergolab._common import DEFAULT_SEED
from ergolab.fixedpoint import GOLDEN
from ergolab.streams import derive_seed, probs_to_thresholds


def best_of(fn, repeat):
    fn()  # warm up (JIT compile on the numba side)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def make_cases(n):
    gold = np.uint64(GOLDEN.frac)
    seed = np.uint64(derive_seed(DEFAULT_SEED, "bench"))
    th = probs_to_thresholds((0.5, 0.5))
    table = np.where(np.arange(16) % 2 == 0, 1.0, -1.0).astype(np.complex128)
    rng = np.random.default_rng(1)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    freqs = np.asarray([1], dtype=np.uint64)
    ones = np.asarray([1.0 + 0j], dtype=np.complex128)
    a_lo = np.asarray([0], dtype=np.uint64)
    a_len = np.asarray([1 << 63], dtype=np.uint64)

    def case_fracs(k):
        return k.rotation_fracs(np.uint64(0), gold, 0, n)

    def case_trig(k):
        fr = k.rotation_fracs(np.uint64(0), gold, 0, n)
        return k.trig_eval_fracs(fr, freqs, ones, 0j)

    def case_symbols(k):
        return k.symbols_range(seed, 0, n, th)

    def case_cylinder(k):
        return k.cylinder_values(seed, th, 0, n, 4, 2, table, 0j)

    def case_kahan(k):
        return k.chunk_partials_c128(z)

    def case_corr(k):
        return k.corr_chunk_partials(z, z, 3, n - 3)

    def case_overlap(k):
        sh = k.rotation_fracs(np.uint64(0), gold, 1, n)
        return k.arc_overlap_measures(a_lo, a_len, a_lo, a_len, sh)

    return [
        ("rotation fracs (u64 stream)", case_fracs),
        ("trig eval on fracs", case_trig),
        ("symbol stream", case_symbols),
        ("cylinder window values", case_cylinder),
        ("chunked kahan partials", case_kahan),
        ("correlation partials", case_corr),
        ("arc overlap measures", case_overlap),
    ]


def deviation(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype.kind in "ui" or b.dtype.kind in "ui":
        return 0.0 if np.array_equal(a, b) else float("inf")
    return float(np.max(np.abs(a - b)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    kn = backend.get_kernels("numba")
    kp = backend.get_kernels("numpy")
    print(f"n = {args.n}, repeat = {args.repeat}, threads = {backend.get_threads()}")
    print(f"{'kernel':<30} {'numba':>10} {'numpy':>10} {'speedup':>8}  max dev")
    for name, fn in make_cases(args.n):
        tn = best_of(lambda: fn(kn), args.repeat)
        tp = best_of(lambda: fn(kp), args.repeat)
        dev = deviation(fn(kn), fn(kp))
        print(f"{name:<30} {tn * 1e3:>8.2f}ms {tp * 1e3:>8.2f}ms {tp / tn:>7.1f}x  {dev:.2e}")


if __name__ == "__main__":
    main()
