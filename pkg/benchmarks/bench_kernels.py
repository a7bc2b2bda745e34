"""Numba vs numpy timings for the evaluation and Loewner kernels.

    python benchmarks/bench_kernels.py [--points 160000] [--repeat 5]

JIT compilation happens in a warmup call before anything is timed.
"""

import argparse
import time

import numpy as np

from schwarzfun import _kernels


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=400 * 400)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba unavailable (or disabled by SCHWARZFUN_DISABLE_NUMBA); nothing to compare")
    _kernels.warmup()
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':10s} {'m':>4s} {'n':>8s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max rel diff':>12s}")
    for m in (25, 70, 150, 380):
        zj = np.exp(2j * np.pi * np.arange(m) / m) * (1.25 + 0.1 * rng.random(m))
        fj = np.conj(zj)
        wj = rng.normal(size=m) + 1j * rng.normal(size=m)
        z = 2.5 * (rng.uniform(-1, 1, args.points) + 1j * rng.uniform(-1, 1, args.points))
        a = _kernels.bary_eval_numpy(z, zj, fj, wj, 1e-13)
        b = _kernels.bary_eval_numba(z, zj, fj, wj, 1e-13)
        diff = np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))
        t_np = best_of(lambda: _kernels.bary_eval_numpy(z, zj, fj, wj, 1e-13), args.repeat)
        t_nb = best_of(lambda: _kernels.bary_eval_numba(z, zj, fj, wj, 1e-13), args.repeat)
        print(f"{'eval':10s} {m:4d} {z.size:8d} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:12.1e}")

    for n, m in ((800, 150), (1800, 380)):
        Z = np.exp(2j * np.pi * rng.random(n))
        zj = np.exp(2j * np.pi * rng.random(m)) * 1.01
        F, fj = np.conj(Z), np.conj(zj)
        same = all(np.array_equal(x, y) for x, y in zip(_kernels.loewner_numpy(Z, F, zj, fj),
                                                         _kernels.loewner_numba(Z, F, zj, fj)))
        t_np = best_of(lambda: _kernels.loewner_numpy(Z, F, zj, fj), args.repeat)
        t_nb = best_of(lambda: _kernels.loewner_numba(Z, F, zj, fj), args.repeat)
        print(f"{'loewner':10s} {m:4d} {n:8d} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} "
              f"{'bitwise' if same else 'DIFFERS':>12s}")


if __name__ == "__main__":
    main()
