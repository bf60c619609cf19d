"""Benchmark the batch scoring kernel: numba JIT path vs pure-numpy path.

Usage: python3 benchmarks/bench_kernels.py [--batch 256] [--repeats 20]
"""

import argparse
import time

import numpy as np

from risopt.channel import draw_channels
from risopt.config import SystemConfig, subrng
from risopt.kernels import HAS_NUMBA, Scorer, _score_batch_numba, _score_batch_numpy


CASES = (
    ("small  (M=4, K=2, N=8,  N_s=16)", dict(m=4, k=2, n=8, n_s=16)),
    ("large  (M=4, K=4, N=32, N_s=64)", dict(m=4, k=4, n=32, n_s=64)),
    ("wide   (M=8, K=4, N=60, N_s=120)", dict(m=8, k=4, n=60, n_s=120)),
)


def bench(fn, args, repeats):
    fn(*args)  # warm-up (JIT compile / cache load)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--repeats", type=int, default=20)
    opts = ap.parse_args()

    print(f"numba available: {HAS_NUMBA}")
    for label, dims in CASES:
        cfg = SystemConfig(b=1, seed=1, **dims)
        ch = draw_channels(cfg, drop=0)
        rng = subrng(1, "bench")
        z = np.zeros(cfg.n_s, dtype=np.int8)
        z[rng.permutation(cfg.n_s)[: cfg.n]] = 1
        scorer = Scorer(cfg, ch, z)
        idx = rng.integers(0, 2, size=(opts.batch, cfg.n_s))
        phases = np.exp(2j * np.pi * idx[:, scorer.active] / 2**cfg.b)
        args = (phases, scorer.a, scorer.bm, scorer.hd, cfg.sigma2,
                cfg.weight_array, cfg.p_max, np.zeros(cfg.k), 0)

        t_np = bench(_score_batch_numpy, args, opts.repeats)
        line = f"{label}  batch={opts.batch}  numpy: {1e6 * t_np / opts.batch:8.2f} us/eval"
        if HAS_NUMBA:
            t_nb = bench(_score_batch_numba, args, opts.repeats)
            line += (f"  numba: {1e6 * t_nb / opts.batch:8.2f} us/eval"
                     f"  speedup: {t_np / t_nb:5.1f}x")
        print(line)


if __name__ == "__main__":
    main()
