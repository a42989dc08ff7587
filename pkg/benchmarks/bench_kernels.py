"""Benchmark: compiled kernels vs the pure-Python fallback.

Times the three hot loops (covariance RK4, joint sensitivity RK4,
Euler-Maruyama mean ensemble) on workloads shaped like the acceptance
runs, checks that both backends agree bitwise, and prints a table.

Run:  python benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from funest.kernels import _fallback

try:
    from funest.kernels import _core
except ImportError:
    _core = None

OMEGA = 2.0 * math.pi * 135e3
GAMMA_ENV = 2.0 * math.pi * 11e3
GAMMA_FUN = 1e-5 * OMEGA
Q = 2.0 * (GAMMA_ENV + GAMMA_FUN)
BB = 2.0 * GAMMA_ENV
DT = 1e-3 * 2.0 * math.pi / OMEGA


def _time(fn, repeat=5):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_riccati(impl):
    n_steps = 200_000
    out = np.empty((n_steps // 1000 + 1, 3))

    def run():
        assert impl.riccati_path(out, 201.0, 0.0, 201.0, OMEGA, Q, BB, DT,
                                 n_steps, 1000) == 0
        return out

    return run, f"riccati RK4, {n_steps} steps"


def bench_sensitivity(impl):
    n_steps = 100_000
    out = np.empty((n_steps // 1000 + 1, 6))
    y0 = (201.0, 0.0, 201.0, 0.0, 0.0, 0.0)

    def run():
        assert impl.sensitivity_path(out, y0, OMEGA, Q, BB, DT,
                                     n_steps, 1000) == 0
        return out

    return run, f"sensitivity RK4, {n_steps} steps"


def bench_means(impl):
    n_steps, nb = 2000, 512
    cov_path = np.empty((n_steps + 1, 3))
    _fallback.riccati_path(cov_path, 201.0, 0.0, 201.0, OMEGA, Q, BB, DT,
                           n_steps, 1)
    rng = np.random.default_rng(0)
    dw = rng.standard_normal((nb, n_steps, 2)) * math.sqrt(DT)
    b = math.sqrt(BB)
    means = np.empty((nb, n_steps // 500 + 1, 2))

    def run():
        x = np.zeros(nb)
        p = np.zeros(nb)
        impl.mean_paths(x, p, cov_path, OMEGA, b, DT, dw, False, 500,
                        means, None)
        return means

    return run, f"mean ensemble, {nb} trajectories x {n_steps} steps"


def main():
    if _core is None:
        print("compiled kernels not built; nothing to compare")
        return
    print(f"{'kernel':<45} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for factory in (bench_riccati, bench_sensitivity, bench_means):
        run_py, label = factory(_fallback)
        run_c, _ = factory(_core)
        out_py = run_py().copy()
        out_c = run_c().copy()
        agree = np.array_equal(out_py, out_c)
        t_py = _time(run_py, repeat=3)
        t_c = _time(run_c, repeat=5)
        marker = "" if agree else "  [MISMATCH]"
        print(f"{label:<45} {t_py * 1e3:>8.1f}ms {t_c * 1e3:>8.1f}ms "
              f"{t_py / t_c:>7.1f}x{marker}")
        if not agree:
            raise SystemExit("backend outputs differ")


if __name__ == "__main__":
    main()
