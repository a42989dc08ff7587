"""Covariance-matrix algebra for single-mode zero-mean Gaussian states.

Convention: the covariance matrix collects the full anticommutator
second moments, so the vacuum state is the identity matrix and the
uncertainty relation reads ``det sigma >= 1``. (In the common
convention with a 1/2 in front of the anticommutator, divide these
matrices by two; purity is ``1/sqrt(det sigma)`` here, with no 2^n
prefactor.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, NotPureError

# det >= 1 - DET_TOL counts as physical: integration to steady state
# leaves ~1e-13 residuals at double precision.
DET_TOL = 1e-12
# |det - 1| <= PURE_TOL counts as pure (Riccati residuals ~1e-10).
PURE_TOL = 1e-9


@dataclass(frozen=True)
class CovMat:
    """Symmetric 2x2 covariance matrix, stored as (xx, xp, pp)."""

    xx: float
    xp: float
    pp: float

    @property
    def det(self) -> float:
        return self.xx * self.pp - self.xp * self.xp

    def matrix(self) -> np.ndarray:
        return np.array([[self.xx, self.xp], [self.xp, self.pp]], dtype=float)

    @staticmethod
    def from_matrix(m: np.ndarray) -> "CovMat":
        """Build from a 2x2 array, symmetrizing the off-diagonal."""
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 matrix, got shape {m.shape}")
        return CovMat(float(m[0, 0]), float(0.5 * (m[0, 1] + m[1, 0])), float(m[1, 1]))

    @staticmethod
    def vacuum() -> "CovMat":
        return CovMat(1.0, 0.0, 1.0)

    @staticmethod
    def thermal(n_th: float) -> "CovMat":
        """Thermal state with mean occupation ``n_th``: (2 n_th + 1) * I."""
        if n_th < 0:
            raise InvalidStateError("n_th must be >= 0")
        v = 2.0 * n_th + 1.0
        return CovMat(v, 0.0, v)


@dataclass(frozen=True)
class GaussianState:
    """First moments plus covariance of a single-mode Gaussian state."""

    mean: tuple[float, float]
    cov: CovMat

    def __post_init__(self):
        if len(self.mean) != 2:
            raise InvalidStateError("mean must have length 2")
        if not is_physical(self.cov):
            raise InvalidStateError(
                f"covariance is not a physical state (det = {self.cov.det!r})"
            )


@dataclass(frozen=True)
class SqueezeFactorization:
    """Rotation/squeeze factorization of a pure covariance matrix.

    Reconstruction: ``R(theta) @ diag(e^{2r}, e^{-2r}) @ R(theta).T``.
    """

    r: float
    theta: float

    def reconstruct(self) -> CovMat:
        c, s = math.cos(self.theta), math.sin(self.theta)
        rot = np.array([[c, -s], [s, c]])
        diag = np.diag([math.exp(2.0 * self.r), math.exp(-2.0 * self.r)])
        return CovMat.from_matrix(rot @ diag @ rot.T)


def is_physical(cov: CovMat) -> bool:
    """True iff positive definite and ``det >= 1 - 1e-12``."""
    return cov.xx > 0.0 and cov.pp > 0.0 and cov.det >= 1.0 - DET_TOL


def _require_physical(cov: CovMat) -> None:
    if not is_physical(cov):
        raise InvalidStateError(
            f"not a physical covariance matrix: xx={cov.xx!r}, det={cov.det!r}"
        )


def purity(cov: CovMat) -> float:
    """Purity ``1 / sqrt(det sigma)``; equals 1 iff the state is pure."""
    _require_physical(cov)
    return 1.0 / math.sqrt(cov.det)


def overlap(a: CovMat, b: CovMat) -> float:
    """State overlap Tr[rho_a rho_b] of two zero-mean Gaussian states.

    Evaluates ``1 / sqrt(det[(sigma_a + sigma_b) / 2])``; symmetric in
    its arguments and equal to ``purity(a)`` when ``a == b``.
    """
    _require_physical(a)
    _require_physical(b)
    m_xx = 0.5 * (a.xx + b.xx)
    m_xp = 0.5 * (a.xp + b.xp)
    m_pp = 0.5 * (a.pp + b.pp)
    return 1.0 / math.sqrt(m_xx * m_pp - m_xp * m_xp)


def factor_pure(cov: CovMat) -> SqueezeFactorization:
    """Factor a pure covariance into squeezing r and rotation theta.

    The eigenvalues of a pure ``sigma`` are ``e^{+-2r}``; ``theta`` is
    the angle of the large-eigenvalue axis, normalized to [0, pi).
    Degenerate input (r = 0) returns theta = 0 by convention.

    Raises:
        NotPureError: if ``|det sigma - 1| > 1e-9``.
    """
    _require_physical(cov)
    det = cov.det
    if abs(det - 1.0) > PURE_TOL:
        raise NotPureError(det)
    half_sum = 0.5 * (cov.xx + cov.pp)
    half_diff = 0.5 * (cov.xx - cov.pp)
    radius = math.hypot(half_diff, cov.xp)
    lam_max = half_sum + radius
    if lam_max <= 1.0 or radius == 0.0:
        return SqueezeFactorization(0.0, 0.0)
    r = 0.5 * math.log(lam_max)
    theta = 0.5 * math.atan2(2.0 * cov.xp, cov.xx - cov.pp)
    theta = theta % math.pi
    return SqueezeFactorization(r, theta)
