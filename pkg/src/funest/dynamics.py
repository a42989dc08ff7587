"""Model matrices and deterministic propagation of second moments.

The monitored oscillator has drift ``A = [[0, w], [-w, 0]]``, diffusion
``Q = diag(0, 2(gamma_env + gamma_fun))`` and measurement matrix ``B``
with the single entry ``B[0, 1] = sqrt(2 eta gamma_env)``. The
conditional covariance obeys the Riccati flow

    d sigma/dt = A sigma + sigma A^T + Q - sigma B B^T sigma,

whose backaction term vanishes for eta = 0, leaving the (unstable)
unconditional Lyapunov flow. All integrators are fixed-step RK4 on the
three independent entries, so symmetry is preserved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    IntegrationFailureError,
    InvalidParameterError,
    InvalidStateError,
    NoSteadyStateError,
)
from .gaussian import CovMat, is_physical
from .params import PhysicalParams

# dt * omega_m above this makes fixed-step RK4 untrustworthy here.
STEP_GUARD = 0.1
# Steady-state detection: per-step relative Frobenius change below
# this for 100 consecutive steps.
CONVERGENCE_TOL = 1e-13
CONVERGENCE_RUN = 100


@dataclass(frozen=True, eq=False)
class ModelMatrices:
    """Drift, diffusion and measurement matrices of the model."""

    A: np.ndarray
    Q: np.ndarray
    B: np.ndarray


@dataclass(frozen=True, eq=False)
class SensitivityPair:
    """Covariance and its parametric derivative at one time.

    ``dcov`` is d sigma / d gamma_fun, a symmetric 2x2 array.
    """

    cov: CovMat
    dcov: np.ndarray


def default_dt(p: PhysicalParams) -> float:
    """Default integrator step: 1e-3 of the trap period."""
    return 1e-3 * 2.0 * math.pi / p.omega_m


def build_matrices(p: PhysicalParams) -> ModelMatrices:
    """Assemble (A, Q, B) for the given parameters."""
    w = p.omega_m
    a = np.array([[0.0, w], [-w, 0.0]])
    q = np.array([[0.0, 0.0], [0.0, 2.0 * (p.gamma_env + p.gamma_fun)]])
    b = np.array([[0.0, math.sqrt(2.0 * p.eta * p.gamma_env)], [0.0, 0.0]])
    return ModelMatrices(A=a, Q=q, B=b)


def riccati_rhs(cov: CovMat, m: ModelMatrices) -> np.ndarray:
    """Right-hand side A s + s A^T + Q - s B B^T s (symmetric 2x2)."""
    s = cov.matrix()
    bbt = m.B @ m.B.T
    rhs = m.A @ s + s @ m.A.T + m.Q - s @ bbt @ s
    return 0.5 * (rhs + rhs.T)


def _check_step(p: PhysicalParams, t_final: float, dt: float) -> None:
    if dt <= 0.0:
        raise InvalidParameterError("dt", "must be > 0")
    if t_final < 0.0:
        raise InvalidParameterError("t_final", "must be >= 0")
    if dt * p.omega_m > STEP_GUARD * (1.0 + 1e-12):
        raise InvalidParameterError(
            "dt", f"step guard violated: dt * omega_m = {dt * p.omega_m!r} > {STEP_GUARD}"
        )


def _check_physical(cov0: CovMat) -> None:
    if not is_physical(cov0):
        raise InvalidStateError(
            f"initial covariance is not physical (det = {cov0.det!r})"
        )


def _segments(t_final: float, dt: float):
    """Split t_final into full steps of dt plus one remainder step."""
    n_full = int(math.floor(t_final / dt + 1e-9))
    rem = t_final - n_full * dt
    segs = []
    if n_full > 0:
        segs.append((n_full, dt))
    if rem > 1e-12 * dt:
        segs.append((1, rem))
    return segs


def _qb(p: PhysicalParams, measured: bool) -> tuple[float, float]:
    q = 2.0 * (p.gamma_env + p.gamma_fun)
    bb = 2.0 * p.eta * p.gamma_env if measured else 0.0
    return q, bb


def _propagate3(cov0: CovMat, p: PhysicalParams, t_final: float, dt: float,
                measured: bool) -> CovMat:
    q, bb = _qb(p, measured)
    y = (cov0.xx, cov0.xp, cov0.pp)
    t_done = 0.0
    for n_steps, h in _segments(t_final, dt):
        out = np.empty((2, 3))
        fail = kernels.riccati_path(out, y[0], y[1], y[2], p.omega_m, q, bb,
                                    h, n_steps, n_steps)
        if fail:
            raise IntegrationFailureError(
                "covariance left the physical region during integration",
                t=t_done + fail * h,
            )
        y = tuple(out[1])
        t_done += n_steps * h
    return CovMat(*y)


def integrate_riccati(cov0: CovMat, p: PhysicalParams, t_final: float,
                      dt: float) -> CovMat:
    """Propagate the conditional covariance to ``t_final``.

    Fixed-step RK4; requires ``dt * omega_m <= 0.1``. Raises
    IntegrationFailureError with the offending time if the state stops
    being physical (instability signal).
    """
    _check_step(p, t_final, dt)
    _check_physical(cov0)
    if t_final == 0.0:
        return cov0
    return _propagate3(cov0, p, t_final, dt, measured=True)


def integrate_lyapunov(cov0: CovMat, p: PhysicalParams, t_final: float,
                       dt: float) -> CovMat:
    """Propagate the unconditional second moments (no backaction).

    Solves d Sigma/dt = A Sigma + Sigma A^T + Q; there is no fixed
    point (the trace grows without bound).
    """
    _check_step(p, t_final, dt)
    _check_physical(cov0)
    if t_final == 0.0:
        return cov0
    return _propagate3(cov0, p, t_final, dt, measured=False)


def riccati_path_points(cov0: CovMat, p: PhysicalParams, n_steps: int, dt: float,
                        stride: int = 1, measured: bool = True) -> np.ndarray:
    """Covariance path at steps 0, stride, ..., n_steps (shape (k, 3)).

    ``n_steps`` must be a multiple of ``stride``. Used by the
    trajectory ensemble (which needs sigma at every step) and by the
    time-series figures.
    """
    _check_step(p, n_steps * dt, dt)
    _check_physical(cov0)
    if n_steps % stride != 0:
        raise InvalidParameterError("stride", "n_steps must be a multiple of stride")
    q, bb = _qb(p, measured)
    out = np.empty((n_steps // stride + 1, 3))
    fail = kernels.riccati_path(out, cov0.xx, cov0.xp, cov0.pp, p.omega_m,
                                q, bb, dt, n_steps, stride)
    if fail:
        raise IntegrationFailureError(
            "covariance left the physical region during integration", t=fail * dt
        )
    return out


def _as_sym(dcov0, name: str) -> np.ndarray:
    d = np.asarray(dcov0, dtype=float)
    if d.shape != (2, 2):
        raise InvalidParameterError(name, f"expected a 2x2 matrix, got {d.shape}")
    scale = max(1.0, float(np.max(np.abs(d))))
    if abs(d[0, 1] - d[1, 0]) > 1e-9 * scale:
        raise InvalidParameterError(name, "matrix must be symmetric")
    return d


def sensitivity_path_points(cov0: CovMat, dcov0, p: PhysicalParams, n_steps: int,
                            dt: float, stride: int = 1) -> np.ndarray:
    """Joint (sigma, d sigma/d gamma_fun) path, shape (k, 6)."""
    _check_step(p, n_steps * dt, dt)
    _check_physical(cov0)
    d = _as_sym(dcov0, "dcov0")
    if n_steps % stride != 0:
        raise InvalidParameterError("stride", "n_steps must be a multiple of stride")
    q, bb = _qb(p, measured=True)
    y0 = (cov0.xx, cov0.xp, cov0.pp, d[0, 0], 0.5 * (d[0, 1] + d[1, 0]), d[1, 1])
    out = np.empty((n_steps // stride + 1, 6))
    fail = kernels.sensitivity_path(out, y0, p.omega_m, q, bb, dt, n_steps, stride)
    if fail:
        raise IntegrationFailureError(
            "covariance left the physical region during integration", t=fail * dt
        )
    return out


def integrate_sensitivity(cov0: CovMat, dcov0, p: PhysicalParams, t_final: float,
                          dt: float) -> SensitivityPair:
    """Jointly integrate the covariance and its gamma_fun derivative.

    The derivative flow is the Riccati equation differentiated with
    respect to gamma_fun: d(s')/dt = A s' + s' A^T + Q' - s' BB^T s -
    s BB^T s' with Q' = diag(0, 2). Use ``dcov0 = 0`` for
    parameter-independent initial states.
    """
    _check_step(p, t_final, dt)
    _check_physical(cov0)
    d = _as_sym(dcov0, "dcov0")
    q, bb = _qb(p, measured=True)
    y = (cov0.xx, cov0.xp, cov0.pp, d[0, 0], 0.5 * (d[0, 1] + d[1, 0]), d[1, 1])
    t_done = 0.0
    for n_steps, h in _segments(t_final, dt):
        out = np.empty((2, 6))
        fail = kernels.sensitivity_path(out, y, p.omega_m, q, bb, h, n_steps, n_steps)
        if fail:
            raise IntegrationFailureError(
                "covariance left the physical region during integration",
                t=t_done + fail * h,
            )
        y = tuple(out[1])
        t_done += n_steps * h
    dcov = np.array([[y[3], y[4]], [y[4], y[5]]])
    return SensitivityPair(cov=CovMat(y[0], y[1], y[2]), dcov=dcov)


def upsilon(p: PhysicalParams) -> float:
    """sqrt(w^2 + 4 eta gamma_env (gamma_env + gamma_fun))."""
    return math.sqrt(
        p.omega_m**2 + 4.0 * p.eta * p.gamma_env * (p.gamma_env + p.gamma_fun)
    )


def _upsilon_minus_omega(p: PhysicalParams) -> float:
    # (Y - w) computed as (Y^2 - w^2)/(Y + w): no cancellation for
    # eta * gamma_env * (gamma_env + gamma_fun) << omega_m^2.
    y = upsilon(p)
    return 4.0 * p.eta * p.gamma_env * (p.gamma_env + p.gamma_fun) / (y + p.omega_m)


def steady_state_analytic(p: PhysicalParams) -> CovMat:
    """Closed-form steady state of the conditional covariance flow.

    Defined for eta > 0 only; without monitoring the model has no
    damping and no steady state exists.
    """
    if p.eta <= 0.0:
        raise NoSteadyStateError(
            "no steady state without monitoring (eta = 0): the dynamics is undamped"
        )
    w = p.omega_m
    eg = p.eta * p.gamma_env
    y = upsilon(p)
    gap = _upsilon_minus_omega(p)
    xx = math.sqrt(w * gap) / (math.sqrt(2.0) * eg)
    xp = gap / (2.0 * eg)
    pp = y * math.sqrt(gap) / (math.sqrt(2.0 * w) * eg)
    return CovMat(xx, xp, pp)


def detectability(p: PhysicalParams) -> bool:
    """Whether (B, A) is detectable, i.e. a stabilizing solution exists.

    Checks ``B x != 0`` for every eigenvector x of A whose eigenvalue
    has nonnegative real part. For this model: true iff eta > 0.
    """
    m = build_matrices(p)
    eigvals, eigvecs = np.linalg.eig(m.A)
    for k in range(len(eigvals)):
        if eigvals[k].real >= -1e-12 * p.omega_m:
            if np.linalg.norm(m.B @ eigvecs[:, k]) == 0.0:
                return False
    return True


def verify_stabilizing(cov: CovMat, p: PhysicalParams) -> bool:
    """Check the stabilizing condition A s + s A^T + Q >= 0."""
    m = build_matrices(p)
    s = cov.matrix()
    lhs = m.A @ s + s @ m.A.T + m.Q
    lhs = 0.5 * (lhs + lhs.T)
    return bool(np.all(np.linalg.eigvalsh(lhs) >= -1e-12))


def integrate_riccati_to_steady(cov0: CovMat, p: PhysicalParams,
                                dt: float | None = None,
                                max_time: float | None = None) -> tuple[CovMat, float]:
    """Integrate until the covariance stops moving; return (cov, time).

    Convergence: relative Frobenius change per step below 1e-13 for
    100 consecutive steps. Raises NoSteadyStateError for eta = 0 and
    IntegrationFailureError if max_time is exhausted first.
    """
    if p.eta <= 0.0:
        raise NoSteadyStateError("eta = 0: the covariance flow does not converge")
    if dt is None:
        dt = default_dt(p)
    if max_time is None:
        max_time = 500.0 / min(p.eta * p.gamma_env, p.omega_m)
    _check_step(p, max_time, dt)
    _check_physical(cov0)
    q, bb = _qb(p, measured=True)
    chunk = CONVERGENCE_RUN
    out = np.empty((chunk + 1, 3))
    y = (cov0.xx, cov0.xp, cov0.pp)
    t = 0.0
    while t < max_time:
        fail = kernels.riccati_path(out, y[0], y[1], y[2], p.omega_m, q, bb,
                                    dt, chunk, 1)
        if fail:
            raise IntegrationFailureError(
                "covariance left the physical region during integration",
                t=t + fail * dt,
            )
        diffs = np.diff(out, axis=0)
        step_norm = np.sqrt(
            diffs[:, 0] ** 2 + 2.0 * diffs[:, 1] ** 2 + diffs[:, 2] ** 2
        )
        ref = np.sqrt(out[-1, 0] ** 2 + 2.0 * out[-1, 1] ** 2 + out[-1, 2] ** 2)
        y = tuple(out[-1])
        t += chunk * dt
        if np.all(step_norm < CONVERGENCE_TOL * ref):
            return CovMat(*y), t
    raise IntegrationFailureError("no steady-state convergence by max_time", t=t)
