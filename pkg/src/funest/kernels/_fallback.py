"""Pure-Python kernel implementations.

Mirrors the compiled extension in `_core.pyx` function for function.
The matrix ODEs are unrolled to scalar arithmetic on the independent
entries (xx, xp, pp); the trajectory ensemble is vectorized across
trajectories with numpy. Arithmetic is ordered identically to the C
code so both backends produce matching results.
"""

import math

import numpy as np

DET_FLOOR = 1.0 - 1e-9


def _rhs3(y0, y1, y2, omega, q, bb):
    # d sigma/dt = A s + s A^T + Q - s B B^T s, unrolled; bb = B12^2.
    return (
        2.0 * omega * y1 - bb * y0 * y0,
        omega * (y2 - y0) - bb * y0 * y1,
        -2.0 * omega * y1 + q - bb * y1 * y1,
    )


def riccati_path(out, xx, xp, pp, omega, q, bb, dt, n_steps, stride):
    """RK4 propagation of the covariance flow, recording every `stride` steps.

    out must be a float64 array of shape (n_steps // stride + 1, 3);
    row j receives the state at step j * stride. Returns 0 on success
    or the 1-based step index at which the state stopped being
    physical (instability signal).
    """
    out[0, 0] = xx
    out[0, 1] = xp
    out[0, 2] = pp
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        a0, a1, a2 = _rhs3(xx, xp, pp, omega, q, bb)
        b0, b1, b2 = _rhs3(xx + half * a0, xp + half * a1, pp + half * a2, omega, q, bb)
        c0, c1, c2 = _rhs3(xx + half * b0, xp + half * b1, pp + half * b2, omega, q, bb)
        d0, d1, d2 = _rhs3(xx + dt * c0, xp + dt * c1, pp + dt * c2, omega, q, bb)
        xx = xx + sixth * (a0 + 2.0 * (b0 + c0) + d0)
        xp = xp + sixth * (a1 + 2.0 * (b1 + c1) + d1)
        pp = pp + sixth * (a2 + 2.0 * (b2 + c2) + d2)
        det = xx * pp - xp * xp
        if not (math.isfinite(det) and xx > 0.0 and det >= DET_FLOOR):
            return step
        if step % stride == 0:
            j = step // stride
            out[j, 0] = xx
            out[j, 1] = xp
            out[j, 2] = pp
    return 0


def _rhs6(y, omega, q, bb):
    xx, xp, pp, dxx, dxp, dpp = y
    return (
        2.0 * omega * xp - bb * xx * xx,
        omega * (pp - xx) - bb * xx * xp,
        -2.0 * omega * xp + q - bb * xp * xp,
        2.0 * omega * dxp - 2.0 * bb * xx * dxx,
        omega * (dpp - dxx) - bb * (dxx * xp + xx * dxp),
        -2.0 * omega * dxp + 2.0 - 2.0 * bb * xp * dxp,
    )


def sensitivity_path(out, y0, omega, q, bb, dt, n_steps, stride):
    """Joint RK4 propagation of (sigma, d sigma / d gamma_fun).

    y0 is the 6-vector (xx, xp, pp, xx', xp', pp'); out has shape
    (n_steps // stride + 1, 6). Return convention as riccati_path.
    """
    y = tuple(float(v) for v in y0)
    out[0] = y
    half = 0.5 * dt
    sixth = dt / 6.0
    for step in range(1, n_steps + 1):
        k1 = _rhs6(y, omega, q, bb)
        k2 = _rhs6(tuple(y[i] + half * k1[i] for i in range(6)), omega, q, bb)
        k3 = _rhs6(tuple(y[i] + half * k2[i] for i in range(6)), omega, q, bb)
        k4 = _rhs6(tuple(y[i] + dt * k3[i] for i in range(6)), omega, q, bb)
        y = tuple(
            y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(6)
        )
        det = y[0] * y[2] - y[1] * y[1]
        if not (math.isfinite(det) and y[0] > 0.0 and det >= DET_FLOOR):
            return step
        if step % stride == 0:
            out[step // stride] = y
    return 0


def mean_paths(x, p, cov_path, omega, b, dt, dw, feedback, stride, means_out, dy_out):
    """Euler-Maruyama update of conditional means for a trajectory batch.

    x, p: (nb,) initial means, overwritten with the final values.
    cov_path: (n_steps + 1, 3) deterministic covariance path.
    dw: (nb, n_steps, 2) Wiener increments (variance dt per component).
    feedback: reset the means to zero after every step (ideal
        drift-cancelling displacement).
    means_out: (nb, n_steps // stride + 1, 2), recorded means.
    dy_out: None, or (nb, n_steps // stride + 1, 2) for the measurement
        record dy = (B^T <r>) dt + dw of the step ending at each
        recorded index (row 0 is zero).
    """
    n_steps = dw.shape[1]
    xv = np.array(x, dtype=float)
    pv = np.array(p, dtype=float)
    means_out[:, 0, 0] = xv
    means_out[:, 0, 1] = pv
    if dy_out is not None:
        dy_out[:, 0, :] = 0.0
    for step in range(n_steps):
        xxs = cov_path[step, 0]
        xps = cov_path[step, 1]
        w1 = dw[:, step, 0]
        w2 = dw[:, step, 1]
        rec = (step + 1) % stride == 0
        if dy_out is not None and rec:
            j = (step + 1) // stride
            dy_out[:, j, 0] = w1
            dy_out[:, j, 1] = b * xv * dt + w2
        xn = xv + omega * pv * dt - b * xxs * w2
        pn = pv - omega * xv * dt - b * xps * w2
        if feedback:
            xn.fill(0.0)
            pn.fill(0.0)
        xv, pv = xn, pn
        if rec:
            j = (step + 1) // stride
            means_out[:, j, 0] = xv
            means_out[:, j, 1] = pv
    x[:] = xv
    p[:] = pv
    return None
