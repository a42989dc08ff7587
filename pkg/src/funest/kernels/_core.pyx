# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: RK4 covariance/sensitivity flows and the
Euler-Maruyama mean-trajectory loop. Mirrors `_fallback.py`."""

from libc.math cimport isfinite

cdef double DET_FLOOR = 1.0 - 1e-9


cdef inline void _rhs3(double y0, double y1, double y2,
                       double omega, double q, double bb, double* f) noexcept nogil:
    f[0] = 2.0 * omega * y1 - bb * y0 * y0
    f[1] = omega * (y2 - y0) - bb * y0 * y1
    f[2] = -2.0 * omega * y1 + q - bb * y1 * y1


def riccati_path(double[:, ::1] out, double xx, double xp, double pp,
                 double omega, double q, double bb, double dt,
                 long n_steps, long stride):
    """See `_fallback.riccati_path`."""
    cdef double a[3]
    cdef double b[3]
    cdef double c[3]
    cdef double d[3]
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef double det
    cdef long step, j
    cdef long fail = 0
    out[0, 0] = xx
    out[0, 1] = xp
    out[0, 2] = pp
    with nogil:
        for step in range(1, n_steps + 1):
            _rhs3(xx, xp, pp, omega, q, bb, a)
            _rhs3(xx + half * a[0], xp + half * a[1], pp + half * a[2], omega, q, bb, b)
            _rhs3(xx + half * b[0], xp + half * b[1], pp + half * b[2], omega, q, bb, c)
            _rhs3(xx + dt * c[0], xp + dt * c[1], pp + dt * c[2], omega, q, bb, d)
            xx = xx + sixth * (a[0] + 2.0 * (b[0] + c[0]) + d[0])
            xp = xp + sixth * (a[1] + 2.0 * (b[1] + c[1]) + d[1])
            pp = pp + sixth * (a[2] + 2.0 * (b[2] + c[2]) + d[2])
            det = xx * pp - xp * xp
            if not (isfinite(det) and xx > 0.0 and det >= DET_FLOOR):
                fail = step
                break
            if step % stride == 0:
                j = step // stride
                out[j, 0] = xx
                out[j, 1] = xp
                out[j, 2] = pp
    return fail


cdef inline void _rhs6(double* y, double omega, double q, double bb,
                       double* f) noexcept nogil:
    f[0] = 2.0 * omega * y[1] - bb * y[0] * y[0]
    f[1] = omega * (y[2] - y[0]) - bb * y[0] * y[1]
    f[2] = -2.0 * omega * y[1] + q - bb * y[1] * y[1]
    f[3] = 2.0 * omega * y[4] - 2.0 * bb * y[0] * y[3]
    f[4] = omega * (y[5] - y[3]) - bb * (y[3] * y[1] + y[0] * y[4])
    f[5] = -2.0 * omega * y[4] + 2.0 - 2.0 * bb * y[1] * y[4]


def sensitivity_path(double[:, ::1] out, y0, double omega, double q, double bb,
                     double dt, long n_steps, long stride):
    """See `_fallback.sensitivity_path`."""
    cdef double y[6]
    cdef double tmp[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef double det
    cdef long step, j, i
    cdef long fail = 0
    for i in range(6):
        y[i] = y0[i]
        out[0, i] = y[i]
    with nogil:
        for step in range(1, n_steps + 1):
            _rhs6(y, omega, q, bb, k1)
            for i in range(6):
                tmp[i] = y[i] + half * k1[i]
            _rhs6(tmp, omega, q, bb, k2)
            for i in range(6):
                tmp[i] = y[i] + half * k2[i]
            _rhs6(tmp, omega, q, bb, k3)
            for i in range(6):
                tmp[i] = y[i] + dt * k3[i]
            _rhs6(tmp, omega, q, bb, k4)
            for i in range(6):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
            det = y[0] * y[2] - y[1] * y[1]
            if not (isfinite(det) and y[0] > 0.0 and det >= DET_FLOOR):
                fail = step
                break
            if step % stride == 0:
                j = step // stride
                for i in range(6):
                    out[j, i] = y[i]
    return fail


def mean_paths(double[::1] x, double[::1] p, double[:, ::1] cov_path,
               double omega, double b, double dt, double[:, :, ::1] dw,
               bint feedback, long stride, double[:, :, ::1] means_out,
               dy_out):
    """See `_fallback.mean_paths`."""
    cdef long nb = x.shape[0]
    cdef long n_steps = dw.shape[1]
    cdef bint rec_dy = dy_out is not None
    cdef double[:, :, ::1] dj
    cdef double xi, pi, xn, pn, xxs, xps, w1, w2
    cdef long i, step, j
    if rec_dy:
        dj = dy_out
    else:
        dj = means_out  # unused; keeps the memoryview initialized
    for i in range(nb):
        means_out[i, 0, 0] = x[i]
        means_out[i, 0, 1] = p[i]
        if rec_dy:
            dj[i, 0, 0] = 0.0
            dj[i, 0, 1] = 0.0
    with nogil:
        for i in range(nb):
            xi = x[i]
            pi = p[i]
            for step in range(n_steps):
                xxs = cov_path[step, 0]
                xps = cov_path[step, 1]
                w1 = dw[i, step, 0]
                w2 = dw[i, step, 1]
                if rec_dy and (step + 1) % stride == 0:
                    j = (step + 1) // stride
                    dj[i, j, 0] = w1
                    dj[i, j, 1] = b * xi * dt + w2
                xn = xi + omega * pi * dt - b * xxs * w2
                pn = pi - omega * xi * dt - b * xps * w2
                if feedback:
                    xn = 0.0
                    pn = 0.0
                xi = xn
                pi = pn
                if (step + 1) % stride == 0:
                    j = (step + 1) // stride
                    means_out[i, j, 0] = xi
                    means_out[i, j, 1] = pi
            x[i] = xi
            p[i] = pi
    return None
