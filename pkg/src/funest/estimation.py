"""Fisher information and measurement budgets for the diffusion rate.

Everything here targets estimation of ``gamma_fun`` from the
steady-state (or finite-time) conditional Gaussian state. The quantum
Fisher information of a zero-mean Gaussian family is

    H = Tr[(sigma^-1 sigma')^2] / (2 (1 + mu^2)) + 2 mu'^2 / (1 - mu^4),

with purity ``mu = 1/sqrt(det sigma)`` and primes denoting
d/d gamma_fun. First moments are identically zero throughout (the
monitored model is operated with drift-cancelling feedback), so the
first-moment term of the general formula is omitted.

The pure-state pole (mu = 1 with mu' != 0) is reported through the
``divergent`` flag, never as a floating-point infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    default_dt,
    integrate_sensitivity,
    sensitivity_path_points,
    steady_state_analytic,
    upsilon,
)
from .errors import (
    DegeneratePovmError,
    InvalidParameterError,
    InvalidStateError,
    NoSteadyStateError,
    NotPureError,
)
from .gaussian import PURE_TOL, CovMat, is_physical
from .params import PhysicalParams

# |1 - mu^4| below this counts as the pure-state pole.
_POLE_TOL = 1e-12


@dataclass(frozen=True)
class QfiResult:
    """Fisher-information value with an explicit divergence flag.

    ``value`` is finite and >= 0 unless ``divergent`` is set, in which
    case it is +inf and must be serialized as a flag, not a number.
    """

    value: float
    divergent: bool = False


@dataclass(frozen=True)
class PovmSpec:
    """Reference parameters defining the dichotomic projector.

    The projector is onto the pure steady state at ``reference``,
    which must have eta = 1 and gamma_fun = 0 (up to 1e-9 on
    det sigma_ss - 1) for the state to be pure.
    """

    reference: PhysicalParams

    @staticmethod
    def for_params(p: PhysicalParams) -> "PovmSpec":
        """Standard choice: perfect monitoring, zero collapse rate."""
        return PovmSpec(reference=p.replace(eta=1.0, gamma_fun=0.0))


def _inv2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def qfi_gaussian(cov: CovMat, dcov) -> QfiResult:
    """QFI of a zero-mean Gaussian family from (sigma, d sigma)."""
    if not is_physical(cov):
        raise InvalidStateError(f"not a physical covariance (det = {cov.det!r})")
    d = np.asarray(dcov, dtype=float)
    if d.shape != (2, 2):
        raise InvalidParameterError("dcov", f"expected 2x2, got {d.shape}")
    det = cov.det
    mu = 1.0 / math.sqrt(det)
    m = _inv2(cov.matrix()) @ d
    tr_m = float(m[0, 0] + m[1, 1])
    tr_m2 = float(m[0, 0] ** 2 + 2.0 * m[0, 1] * m[1, 0] + m[1, 1] ** 2)
    mu_prime = -0.5 * mu * tr_m
    first = 0.5 * tr_m2 / (1.0 + mu * mu)
    pole = 1.0 - mu**4
    if abs(pole) < _POLE_TOL:
        if abs(mu_prime) > _POLE_TOL:
            return QfiResult(value=math.inf, divergent=True)
        return QfiResult(value=first)
    return QfiResult(value=first + 2.0 * mu_prime**2 / pole)


def dcov_steady(p: PhysicalParams) -> np.ndarray:
    """Closed-form d sigma_ss / d gamma_fun.

    Differentiates the analytic steady state using
    dY/d gamma_fun = 2 eta gamma_env / Y for
    Y = sqrt(w^2 + 4 eta gamma_env (gamma_env + gamma_fun)).
    """
    if p.eta <= 0.0:
        raise NoSteadyStateError("eta = 0: steady state undefined")
    w = p.omega_m
    y = upsilon(p)
    gap = 4.0 * p.eta * p.gamma_env * (p.gamma_env + p.gamma_fun) / (y + w)
    dxx = w / (math.sqrt(2.0) * y * math.sqrt(w * gap))
    dxp = 1.0 / y
    dpp = (3.0 * y - 2.0 * w) / (y * math.sqrt(gap) * math.sqrt(2.0 * w))
    return np.array([[dxx, dxp], [dxp, dpp]])


def qfi_steady_closed(p: PhysicalParams) -> QfiResult:
    """Closed-form steady-state QFI for gamma_fun.

    Divergent exactly at eta = 1, gamma_fun = 0 (the steady state
    turns pure and the purity derivative stays finite).
    """
    if p.eta <= 0.0:
        raise NoSteadyStateError("eta = 0: steady state undefined")
    w, ge, gf, eta = p.omega_m, p.gamma_env, p.gamma_fun, p.eta
    if gf == 0.0 and eta == 1.0:
        return QfiResult(value=math.inf, divergent=True)
    y = upsilon(p)
    num = ge * ((1.0 - eta) * w - (3.0 + eta) * y) + gf * (w - 3.0 * y)
    den = 8.0 * y * (ge + gf) * (eta**2 * ge**2 - (ge + gf) ** 2)
    if den == 0.0:
        return QfiResult(value=math.inf, divergent=True)
    return QfiResult(value=num / den)


def qfi_eta1(gamma_env: float, gamma_fun: float, omega_m: float) -> QfiResult:
    """Compact steady-state QFI for perfect monitoring (eta = 1)."""
    if gamma_env <= 0.0:
        raise InvalidParameterError("gamma_env", "must be > 0")
    if omega_m <= 0.0:
        raise InvalidParameterError("omega_m", "must be > 0")
    if gamma_fun < 0.0:
        raise InvalidParameterError("gamma_fun", "must be >= 0")
    if gamma_fun == 0.0:
        return QfiResult(value=math.inf, divergent=True)
    y = math.sqrt(omega_m**2 + 4.0 * gamma_env * (gamma_env + gamma_fun))
    num = 3.0 + 4.0 * gamma_env / gamma_fun - omega_m / y
    den = 8.0 * (gamma_env + gamma_fun) * (2.0 * gamma_env + gamma_fun)
    return QfiResult(value=num / den)


def _reference_cov(spec: PovmSpec) -> CovMat:
    ref = steady_state_analytic(spec.reference)
    if abs(ref.det - 1.0) > PURE_TOL:
        raise NotPureError(ref.det)
    return ref


def povm_fi(p: PhysicalParams, spec: PovmSpec) -> float:
    """Classical FI of the dichotomic projector onto the reference state.

    The outcome probability is the overlap of the steady state at
    ``p`` with the pure reference state; its gamma_fun derivative is
    taken analytically through the overlap determinant. Guaranteed
    never to exceed the QFI.

    Raises:
        DegeneratePovmError: if the outcome probability is 0 or 1 to
            within 1e-14 (e.g. at the reference point itself).
    """
    ref = _reference_cov(spec)
    s = steady_state_analytic(p)
    ds = dcov_steady(p)
    total = s.matrix() + ref.matrix()
    det_total = total[0, 0] * total[1, 1] - total[0, 1] * total[1, 0]
    p0 = 2.0 / math.sqrt(det_total)
    if p0 >= 1.0 - 1e-14 or p0 <= 1e-14:
        raise DegeneratePovmError(f"outcome probability p0 = {p0!r}")
    tr = float(np.trace(_inv2(total) @ ds))
    dp0 = -0.5 * p0 * tr
    return dp0 * dp0 / (p0 * (1.0 - p0))


def snr_bound(p: PhysicalParams, m_runs: int) -> float:
    """Best signal-to-noise ratio after ``m_runs`` estimation runs.

    Saturates the quantum Cramer-Rao bound:
    S = gamma_fun * sqrt(m_runs * H_ss). Vanishes with gamma_fun.
    """
    if m_runs < 1:
        raise InvalidParameterError("m_runs", "must be >= 1")
    if p.gamma_fun == 0.0:
        return 0.0
    h = qfi_steady_closed(p)
    return p.gamma_fun * math.sqrt(m_runs * h.value)


def snr_csl_eta1(beta: float, gamma_env: float, omega_m: float, m_runs: int) -> float:
    """SNR bound at eta = 1 in collapse-model form.

    ``beta`` is the frequency-independent collapse strength; the
    corresponding diffusion rate is beta / omega_m. Strictly
    decreasing in omega_m: slower oscillators resolve the collapse
    strength better.
    """
    if beta <= 0.0:
        raise InvalidParameterError("beta", "must be > 0")
    if gamma_env <= 0.0:
        raise InvalidParameterError("gamma_env", "must be > 0")
    if omega_m <= 0.0:
        raise InvalidParameterError("omega_m", "must be > 0")
    if m_runs < 1:
        raise InvalidParameterError("m_runs", "must be >= 1")
    y = math.sqrt(
        omega_m**2 + 4.0 * gamma_env * (gamma_env + beta / omega_m)
    )
    num = 3.0 + 4.0 * omega_m * gamma_env / beta - omega_m / y
    den = 8.0 * (beta + gamma_env * omega_m) * (beta + 2.0 * gamma_env * omega_m)
    return math.sqrt(m_runs) * beta * math.sqrt(num / den)


def runs_for_unit_snr(p: PhysicalParams) -> int:
    """Minimum runs for S >= 1 implied by the Cramer-Rao bound."""
    if p.gamma_fun <= 0.0:
        raise InvalidParameterError("gamma_fun", "must be > 0")
    h = qfi_steady_closed(p)
    if h.divergent:
        return 1
    return int(math.ceil(1.0 / (p.gamma_fun**2 * h.value)))


def qfi_finite_time(p: PhysicalParams, n_th: float, t: float,
                    dt: float | None = None) -> QfiResult:
    """QFI of the state at time ``t`` from a thermal start.

    The initial state is thermal with occupation ``n_th`` (covariance
    (2 n_th + 1) I, parameter independent, so sigma'(0) = 0). The
    ratio to the steady-state QFI tends to one as t grows.
    """
    if n_th < 0.0:
        raise InvalidParameterError("n_th", "must be >= 0")
    if dt is None:
        dt = default_dt(p)
    pair = integrate_sensitivity(
        CovMat.thermal(n_th), np.zeros((2, 2)), p, t, dt
    )
    return qfi_gaussian(pair.cov, pair.dcov)


def qfi_time_series(p: PhysicalParams, n_th: float, t_final: float,
                    dt: float | None = None, n_out: int = 200
                    ) -> tuple[np.ndarray, list[QfiResult]]:
    """QFI along the relaxation from a thermal start.

    Returns (times, results) with about ``n_out`` output points; the
    sensitivity pair is integrated once and sampled along the way.
    """
    if n_th < 0.0:
        raise InvalidParameterError("n_th", "must be >= 0")
    if dt is None:
        dt = default_dt(p)
    raw = max(1, int(math.ceil(t_final / dt)))
    stride = max(1, raw // max(1, n_out))
    n_steps = int(math.ceil(raw / stride)) * stride
    path = sensitivity_path_points(
        CovMat.thermal(n_th), np.zeros((2, 2)), p, n_steps, dt, stride
    )
    times = np.arange(path.shape[0]) * (stride * dt)
    results = []
    for row in path:
        cov = CovMat(row[0], row[1], row[2])
        dcov = np.array([[row[3], row[4]], [row[4], row[5]]])
        results.append(qfi_gaussian(cov, dcov))
    return times, results
