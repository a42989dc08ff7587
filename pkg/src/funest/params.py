"""Physical parameters, validation, and the collapse-rate mapping.

Two unit modes are supported and never mixed within one computation:

* ``natural`` -- the trap frequency sets the scale (``omega_m = 1``,
  ``hbar = 1``); used for dimensionless sweeps.
* ``si`` -- angular frequencies in rad/s, ``hbar`` in J s; used for
  laboratory-scale runs.

The mode is an explicit field of run configurations (see
:mod:`funest.config`); it is never inferred from magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidParameterError

HBAR_SI = 1.0545718e-34
HBAR_NATURAL = 1.0

UNIT_MODES = ("natural", "si")


def _require(cond: bool, fieldname: str, message: str) -> None:
    if not cond:
        raise InvalidParameterError(fieldname, message)


@dataclass(frozen=True)
class PhysicalParams:
    """The four dynamical rates of the monitored oscillator model.

    Attributes:
        omega_m: trap angular frequency (rad/s, or 1 in natural units).
        gamma_env: environmental momentum-diffusion rate, same units
            as ``omega_m``.
        gamma_fun: fundamental (collapse-induced) momentum-diffusion
            rate, same units as ``omega_m``.
        eta: monitoring efficiency in [0, 1].
    """

    omega_m: float
    gamma_env: float
    gamma_fun: float
    eta: float

    def __post_init__(self):
        _require(self.omega_m > 0, "omega_m", "must be > 0")
        _require(self.gamma_env > 0, "gamma_env", "must be > 0")
        _require(self.gamma_fun >= 0, "gamma_fun", "must be >= 0")
        _require(0.0 <= self.eta <= 1.0, "eta", "must lie in [0, 1]")

    def replace(self, **kwargs) -> "PhysicalParams":
        """Return a copy with the given fields replaced."""
        values = {
            "omega_m": self.omega_m,
            "gamma_env": self.gamma_env,
            "gamma_fun": self.gamma_fun,
            "eta": self.eta,
        }
        values.update(kwargs)
        return PhysicalParams(**values)


@dataclass(frozen=True)
class CslParams:
    """Inputs of the continuous-localization model.

    ``alpha`` is a user-supplied geometry factor (default 1); computing
    it from sphere geometry is out of scope. ``hbar`` defaults to the
    SI value; pass ``hbar=1`` in natural units.
    """

    lambda_csl: float
    r_c: float
    mass: float
    alpha: float = 1.0
    hbar: float = field(default=HBAR_SI)

    def __post_init__(self):
        _require(self.lambda_csl >= 0, "lambda_csl", "must be >= 0")
        _require(self.r_c > 0, "r_c", "must be > 0")
        _require(self.mass > 0, "mass", "must be > 0")
        _require(self.alpha > 0, "alpha", "must be > 0")
        _require(self.hbar > 0, "hbar", "must be > 0")


def gamma_fun_from_csl(csl: CslParams, omega_m: float) -> float:
    """Map collapse-model inputs to the momentum-diffusion rate.

    Returns ``alpha * hbar * lambda_csl / (mass * omega_m * r_c**2)``,
    in the units of ``omega_m`` when SI inputs are used.
    """
    _require(omega_m > 0, "omega_m", "must be > 0")
    return csl.alpha * csl.hbar * csl.lambda_csl / (csl.mass * omega_m * csl.r_c**2)


def beta_from_csl(csl: CslParams) -> float:
    """Frequency-independent collapse strength.

    Returns ``beta = alpha * hbar * lambda_csl / (mass * r_c**2)``;
    satisfies ``gamma_fun_from_csl(csl, w) == beta_from_csl(csl) / w``.
    """
    return csl.alpha * csl.hbar * csl.lambda_csl / (csl.mass * csl.r_c**2)


def default_hbar(units: str) -> float:
    """hbar for the given unit mode ('natural' or 'si')."""
    if units not in UNIT_MODES:
        raise InvalidParameterError("units", f"must be one of {UNIT_MODES}")
    return HBAR_NATURAL if units == "natural" else HBAR_SI
