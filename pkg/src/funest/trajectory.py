"""Stochastic simulation of the conditional means under monitoring.

The conditional first moments obey the linear SDE

    d<r> = A <r> dt - sigma B dw,

driven by a two-component Wiener process (variance dt per component),
while the covariance path sigma(t) is deterministic and shared by all
trajectories. With feedback enabled, an ideal drift-cancelling
displacement resets the means to zero after every step, which models
real-time linear feedback and removes the stochasticity of the state.

Trajectory streams are counter-based: trajectory ``i`` draws from
``Philox(key=seed).jumped(i)``, so results do not depend on batch
layout or execution order, and identical seeds reproduce bit-identical
output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import riccati_path_points
from .errors import InvalidParameterError
from .gaussian import GaussianState
from .params import PhysicalParams

# Guards: total work and recorded-array size for one simulate() call.
_MAX_TOTAL_STEPS = 10**10
_MAX_RECORDED = 2**28
# Upper bound on the per-batch noise buffer (elements).
_NOISE_BUDGET = 2**23


@dataclass(frozen=True)
class TrajectoryConfig:
    """Run settings for a trajectory ensemble.

    ``record_stride`` controls how often means (and optionally the
    measurement record) are stored: steps 0, stride, 2*stride, ...,
    n_steps. It must divide n_steps.
    """

    dt: float
    n_steps: int
    n_traj: int
    seed: int
    feedback: bool = False
    record_output: bool = False
    record_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InvalidParameterError("dt", "must be > 0")
        if self.n_steps < 1:
            raise InvalidParameterError("n_steps", "must be >= 1")
        if self.n_traj < 1:
            raise InvalidParameterError("n_traj", "must be >= 1")
        if self.record_stride < 1:
            raise InvalidParameterError("record_stride", "must be >= 1")
        if self.n_steps % self.record_stride != 0:
            raise InvalidParameterError(
                "record_stride", "must divide n_steps"
            )
        if self.n_traj * self.n_steps > _MAX_TOTAL_STEPS:
            raise InvalidParameterError(
                "n_traj", f"n_traj * n_steps exceeds {_MAX_TOTAL_STEPS}"
            )
        if self.n_traj * (self.n_recorded * 2) > _MAX_RECORDED:
            raise InvalidParameterError(
                "record_stride",
                "recorded array too large; increase record_stride",
            )

    @property
    def n_recorded(self) -> int:
        return self.n_steps // self.record_stride + 1


@dataclass(frozen=True, eq=False)
class TrajectoryResult:
    """Ensemble output at the recorded steps.

    means has shape (n_traj, k, 2); record (same shape) holds the
    measurement increments dy = (B^T <r>) dt + dw of the step ending
    at each recorded index, or None when not recorded; cov_path
    (k, 3) is the shared deterministic covariance path.
    """

    times: np.ndarray
    means: np.ndarray
    record: np.ndarray | None
    cov_path: np.ndarray
    config: TrajectoryConfig
    params: PhysicalParams


@dataclass(frozen=True, eq=False)
class EnsembleMoments:
    """Sample moments across trajectories at one recorded step."""

    mean: np.ndarray
    mean_se: np.ndarray
    second_moment: np.ndarray
    second_moment_se: np.ndarray
    n_traj: int


def _batch_size(n_steps: int) -> int:
    return max(1, min(1024, _NOISE_BUDGET // (2 * n_steps)))


def simulate(p: PhysicalParams, state0: GaussianState, cfg: TrajectoryConfig,
             _noise=None) -> TrajectoryResult:
    """Euler-Maruyama ensemble of conditional-mean trajectories.

    The covariance path is integrated once (RK4) and shared;
    trajectory i uses the jumped Philox stream i of ``cfg.seed``.
    ``_noise`` is a test hook: a callable (traj_index, n_steps) ->
    (n_steps, 2) array of increments used verbatim instead of the RNG.
    """
    full_path = riccati_path_points(state0.cov, p, cfg.n_steps, cfg.dt, stride=1)
    b = math.sqrt(2.0 * p.eta * p.gamma_env)
    k = cfg.n_recorded
    means = np.empty((cfg.n_traj, k, 2))
    record = np.empty((cfg.n_traj, k, 2)) if cfg.record_output else None
    root = np.random.Philox(key=cfg.seed)
    sqrt_dt = math.sqrt(cfg.dt)
    batch = _batch_size(cfg.n_steps)
    for start in range(0, cfg.n_traj, batch):
        stop = min(start + batch, cfg.n_traj)
        nb = stop - start
        dw = np.empty((nb, cfg.n_steps, 2))
        for j in range(nb):
            if _noise is not None:
                dw[j] = _noise(start + j, cfg.n_steps)
            else:
                gen = np.random.Generator(root.jumped(start + j))
                dw[j] = gen.standard_normal((cfg.n_steps, 2)) * sqrt_dt
        x = np.full(nb, float(state0.mean[0]))
        pm = np.full(nb, float(state0.mean[1]))
        dy_out = record[start:stop] if record is not None else None
        kernels.mean_paths(x, pm, full_path, p.omega_m, b, cfg.dt, dw,
                           cfg.feedback, cfg.record_stride,
                           means[start:stop], dy_out)
    times = np.arange(k) * (cfg.record_stride * cfg.dt)
    return TrajectoryResult(
        times=times,
        means=means,
        record=record,
        cov_path=full_path[:: cfg.record_stride].copy(),
        config=cfg,
        params=p,
    )


def ensemble_moments(result: TrajectoryResult, step: int) -> EnsembleMoments:
    """Sample mean and second-moment matrix at a recorded step.

    Standard errors are sample standard deviations over trajectories
    divided by sqrt(n_traj) (zero for a single trajectory).
    """
    k = result.means.shape[1]
    if not 0 <= step < k:
        raise IndexError(f"recorded step {step} out of range [0, {k})")
    m = result.means[:, step, :]
    n = m.shape[0]
    mean = m.mean(axis=0)
    products = np.stack([m[:, 0] * m[:, 0], m[:, 0] * m[:, 1], m[:, 1] * m[:, 1]],
                        axis=1)
    second_flat = products.mean(axis=0)
    if n > 1:
        mean_se = m.std(axis=0, ddof=1) / math.sqrt(n)
        second_se_flat = products.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        mean_se = np.zeros(2)
        second_se_flat = np.zeros(3)
    second = np.array([[second_flat[0], second_flat[1]],
                       [second_flat[1], second_flat[2]]])
    second_se = np.array([[second_se_flat[0], second_se_flat[1]],
                          [second_se_flat[1], second_se_flat[2]]])
    return EnsembleMoments(mean=mean, mean_se=mean_se, second_moment=second,
                           second_moment_se=second_se, n_traj=n)
