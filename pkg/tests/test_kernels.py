"""Backend parity and independent-integrator checks for the kernels."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from funest import CovMat, PhysicalParams, default_dt, integrate_riccati
from funest.kernels import _fallback

try:
    from funest.kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")

P_STD = PhysicalParams(1.0, 0.1, 0.01, 0.8)


def _kernel_args(p):
    q = 2.0 * (p.gamma_env + p.gamma_fun)
    bb = 2.0 * p.eta * p.gamma_env
    return q, bb


@needs_core
def test_riccati_parity_bitwise():
    q, bb = _kernel_args(P_STD)
    out_c = np.empty((9, 3))
    out_py = np.empty((9, 3))
    rc = _core.riccati_path(out_c, 5.0, 0.3, 4.0, 1.0, q, bb, 0.006, 800, 100)
    rp = _fallback.riccati_path(out_py, 5.0, 0.3, 4.0, 1.0, q, bb, 0.006, 800, 100)
    assert rc == rp == 0
    assert np.array_equal(out_c, out_py)


@needs_core
def test_sensitivity_parity_bitwise():
    q, bb = _kernel_args(P_STD)
    y0 = (5.0, 0.3, 4.0, 0.0, 0.0, 0.0)
    out_c = np.empty((9, 6))
    out_py = np.empty((9, 6))
    rc = _core.sensitivity_path(out_c, y0, 1.0, q, bb, 0.006, 800, 100)
    rp = _fallback.sensitivity_path(out_py, y0, 1.0, q, bb, 0.006, 800, 100)
    assert rc == rp == 0
    assert np.array_equal(out_c, out_py)


@needs_core
def test_mean_paths_parity_bitwise():
    q, bb = _kernel_args(P_STD)
    n_steps, nb = 300, 16
    cov_path = np.empty((n_steps + 1, 3))
    _fallback.riccati_path(cov_path, 3.0, 0.0, 3.0, 1.0, q, bb, 0.006, n_steps, 1)
    rng = np.random.default_rng(123)
    dw = rng.standard_normal((nb, n_steps, 2)) * math.sqrt(0.006)
    b = math.sqrt(bb)
    results = []
    for impl in (_core, _fallback):
        x = np.zeros(nb)
        pm = np.zeros(nb)
        means = np.empty((nb, n_steps // 50 + 1, 2))
        dy = np.empty_like(means)
        impl.mean_paths(x, pm, cov_path, 1.0, b, 0.006, dw.copy(), False, 50,
                        means, dy)
        results.append((x.copy(), pm.copy(), means.copy(), dy.copy()))
    for a, c in zip(results[0], results[1]):
        assert np.array_equal(a, c)


def test_riccati_against_solve_ivp():
    rng = np.random.default_rng(51)
    for _ in range(5):
        ge = float(10.0 ** rng.uniform(-2, np.log10(0.5)))
        p = PhysicalParams(1.0, ge, float(rng.uniform(0, ge)),
                           float(rng.uniform(0.1, 1.0)))
        q, bb = _kernel_args(p)

        def rhs(t, y):
            xx, xp, pp = y
            return [2.0 * xp - bb * xx * xx,
                    (pp - xx) - bb * xx * xp,
                    -2.0 * xp + q - bb * xp * xp]

        y0 = [7.0, 0.0, 7.0]
        t_final = 30.0
        ref = solve_ivp(rhs, (0.0, t_final), y0, rtol=1e-11, atol=1e-13,
                        method="DOP853").y[:, -1]
        got = integrate_riccati(CovMat(7.0, 0.0, 7.0), p, t_final, default_dt(p))
        assert np.allclose([got.xx, got.xp, got.pp], ref, rtol=1e-8, atol=1e-12)


def test_failure_step_reported():
    # nonsensical giant step makes RK4 blow up immediately
    out = np.empty((2, 3))
    fail = _fallback.riccati_path(out, 1e8, 0.0, 1e8, 1.0, 0.22, 0.2, 10.0, 4, 4)
    assert fail >= 1
    if _core is not None:
        out2 = np.empty((2, 3))
        fail2 = _core.riccati_path(out2, 1e8, 0.0, 1e8, 1.0, 0.22, 0.2, 10.0, 4, 4)
        assert fail2 == fail
