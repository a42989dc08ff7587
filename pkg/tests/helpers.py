"""Shared helpers for the test suite."""

import numpy as np

from funest import CovMat, PhysicalParams


def random_physical_cov(rng, max_squeeze=1.0, max_thermal=4.0) -> CovMat:
    """Random physical covariance: rotated squeezed thermal state."""
    r = rng.uniform(0.0, max_squeeze)
    theta = rng.uniform(0.0, np.pi)
    n_th = rng.uniform(0.0, max_thermal)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    m = (2.0 * n_th + 1.0) * rot @ np.diag([np.exp(2 * r), np.exp(-2 * r)]) @ rot.T
    return CovMat.from_matrix(m)


def random_params(rng, eta_min=0.1) -> PhysicalParams:
    """Random valid parameter set in natural units."""
    gamma_env = float(10.0 ** rng.uniform(-2.0, np.log10(0.5)))
    gamma_fun = float(rng.uniform(0.0, 1.0) * gamma_env)
    eta = float(rng.uniform(eta_min, 1.0))
    return PhysicalParams(1.0, gamma_env, gamma_fun, eta)


def cov_array(cov: CovMat) -> np.ndarray:
    return np.array([cov.xx, cov.xp, cov.pp])


def rel_frobenius(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
