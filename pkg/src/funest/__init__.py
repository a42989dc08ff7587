"""Conditional Gaussian dynamics and Fisher-information budgets for
fundamental-noise estimation in a continuously monitored oscillator."""

__version__ = "0.1.0"

from .dynamics import (
    ModelMatrices,
    SensitivityPair,
    build_matrices,
    default_dt,
    detectability,
    integrate_lyapunov,
    integrate_riccati,
    integrate_riccati_to_steady,
    integrate_sensitivity,
    riccati_rhs,
    steady_state_analytic,
    verify_stabilizing,
)
from .estimation import (
    PovmSpec,
    QfiResult,
    dcov_steady,
    povm_fi,
    qfi_eta1,
    qfi_finite_time,
    qfi_gaussian,
    qfi_steady_closed,
    qfi_time_series,
    runs_for_unit_snr,
    snr_bound,
    snr_csl_eta1,
)
from .gaussian import (
    CovMat,
    GaussianState,
    SqueezeFactorization,
    factor_pure,
    is_physical,
    overlap,
    purity,
)
from .kernels import BACKEND
from .params import (
    CslParams,
    PhysicalParams,
    beta_from_csl,
    default_hbar,
    gamma_fun_from_csl,
)
from .trajectory import (
    EnsembleMoments,
    TrajectoryConfig,
    TrajectoryResult,
    ensemble_moments,
    simulate,
)

__all__ = [
    "__version__",
    "BACKEND",
    "CovMat",
    "CslParams",
    "EnsembleMoments",
    "GaussianState",
    "ModelMatrices",
    "PhysicalParams",
    "PovmSpec",
    "QfiResult",
    "SensitivityPair",
    "SqueezeFactorization",
    "TrajectoryConfig",
    "TrajectoryResult",
    "beta_from_csl",
    "build_matrices",
    "dcov_steady",
    "default_dt",
    "default_hbar",
    "detectability",
    "ensemble_moments",
    "factor_pure",
    "gamma_fun_from_csl",
    "integrate_lyapunov",
    "integrate_riccati",
    "integrate_riccati_to_steady",
    "integrate_sensitivity",
    "is_physical",
    "overlap",
    "povm_fi",
    "purity",
    "qfi_eta1",
    "qfi_finite_time",
    "qfi_gaussian",
    "qfi_steady_closed",
    "qfi_time_series",
    "riccati_rhs",
    "runs_for_unit_snr",
    "simulate",
    "snr_bound",
    "snr_csl_eta1",
    "steady_state_analytic",
    "verify_stabilizing",
]
