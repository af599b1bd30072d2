"""Time the per-center statistic scan on both backends.

    python3 benchmarks/bench_kernels.py [--n 200] [--repeat 5]

Checks that the two backends agree before timing them.
"""

import argparse
import time

import numpy as np

from mixedclust import _kernels
from mixedclust.bench import SynthConfig, gen_mixed
from mixedclust.config import ClusterConfig
from mixedclust.nullmodel import sample_null
from mixedclust.stat import scan_statistics


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    cfg = ClusterConfig()
    print(f"{'n':>6} {'null':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n in args.n:
        a = n // 2
        ds = gen_mixed(SynthConfig(sizes=(a, n - a), seed=n)).data
        null = sample_null(ds, cfg.null_size_for(n), seed=0)
        # first call compiles (or loads the on-disk cache)
        ref = scan_statistics(ds, null, cfg, backend="numba")
        alt = scan_statistics(ds, null, cfg, backend="numpy")
        assert np.array_equal(ref.r_c, alt.r_c) and np.array_equal(ref.r_d, alt.r_d)
        assert np.allclose(ref.chi_w, alt.chi_w, rtol=1e-12)
        t_np = best_of(lambda: scan_statistics(ds, null, cfg, backend="numpy"), args.repeat)
        t_nb = best_of(lambda: scan_statistics(ds, null, cfg, backend="numba"), args.repeat)
        print(f"{n:>6} {null.size:>6} {t_np * 1e3:>10.1f} {t_nb * 1e3:>10.1f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
