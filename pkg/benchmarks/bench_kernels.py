"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python benchmarks/bench_kernels.py [--points 200000] [--modes 200] [--repeats 5]
"""
import argparse
import time

import numpy as np

from ductbarrier import kernels


def timeit(fun, *args, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fun(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def series_workload(points, modes, rng):
    x = rng.uniform(0.0, 1.0, points)
    z = rng.uniform(-1.0, 0.0, points)
    kx = np.arange(1, modes + 1) * np.pi
    xoff = np.zeros(modes)
    amp = np.full(modes, np.sqrt(2.0))
    c1 = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    c2 = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    e1 = np.concatenate([[1j * 2.5], np.sqrt(np.arange(2, modes + 1) ** 2 * np.pi**2 - 16.0)]).astype(complex)
    e2 = np.full(modes, 1j * 2.5, dtype=complex)
    zr = np.zeros(modes)
    return (x, z, kx, xoff, amp, c1, e1, zr, c2, e2, zr)


def stencil_workload(n, rng):
    idx = -np.ones((n, 3 * n), dtype=np.int64)
    free = rng.uniform(size=idx.shape) > 0.15
    idx[free] = np.arange(int(free.sum()))
    return (idx, 0.02, 1, 3 * n - 2, -1)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--modes", type=int, default=200)
    ap.add_argument("--size", type=int, default=400, help="transverse stencil size")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if not kernels.USING_NUMBA:
        print("numba backend unavailable (DUCTBARRIER_NUMBA=0 or numba missing); "
              "benchmarking numpy only")

    rng = np.random.default_rng(0)
    series_args = series_workload(args.points, args.modes, rng)
    stencil_args = stencil_workload(args.size, rng)

    rows = []
    t_np, ref = timeit(kernels.modal_series_numpy, *series_args, repeats=args.repeats)
    if kernels.USING_NUMBA:
        kernels.modal_series_numba(*series_workload(64, 8, rng))  # compile
        t_nb, out = timeit(kernels.modal_series_numba, *series_args, repeats=args.repeats)
        err = float(np.max(np.abs(out - ref)))
        rows.append(("modal_series", t_np, t_nb, err))
    else:
        rows.append(("modal_series", t_np, float("nan"), 0.0))

    t_np, ref = timeit(kernels.stencil_triplets_numpy, *stencil_args, repeats=args.repeats)
    if kernels.USING_NUMBA:
        kernels.stencil_triplets_numba(*stencil_workload(8, rng))  # compile
        t_nb, out = timeit(kernels.stencil_triplets_numba, *stencil_args, repeats=args.repeats)
        import scipy.sparse as sp
        n_unk = int(stencil_args[0].max()) + 1
        a = sp.csr_matrix((ref[2], (ref[0], ref[1])), shape=(n_unk, n_unk))
        b = sp.csr_matrix((out[2], (out[0], out[1])), shape=(n_unk, n_unk))
        err = abs(a - b).max()
        rows.append(("stencil_triplets", t_np, t_nb, err))
    else:
        rows.append(("stencil_triplets", t_np, float("nan"), 0.0))

    print(f"{'kernel':<18} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9} {'max diff':>10}")
    for name, t_np, t_nb, err in rows:
        speed = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"{name:<18} {1e3 * t_np:>12.2f} {1e3 * t_nb:>12.2f} {speed:>9.2f} {err:>10.2e}")


if __name__ == "__main__":
    main()
