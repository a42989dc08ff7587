"""Plain-text configuration files and environment overrides.

Format: one ``key = value`` pair per line; ``#`` starts a comment
(full line, or trailing after whitespace); section membership is
spelled with dotted keys, e.g. ``csl.lambda_csl = 1e-8``.

Recognized top-level keys:

    omega_m, gamma_env, gamma_fun, eta   physical parameters
    units = natural | si                 unit mode (default natural)
    csl.lambda_csl, csl.r_c, csl.mass,   collapse-model block; used to
    csl.alpha, csl.hbar                  derive gamma_fun when absent

plus subcommand-specific blocks (``figN.*``, ``sweep.*``,
``trajectory.*``) documented in the README.

Environment overrides: ``FUNEST_<KEY>`` with dots spelled as double
underscores, e.g. ``FUNEST_CSL__LAMBDA_CSL=2e-8`` overrides
``csl.lambda_csl``.
"""

from __future__ import annotations

import os
import re

from .errors import ConfigError
from .params import CslParams, PhysicalParams, default_hbar, gamma_fun_from_csl

ENV_PREFIX = "FUNEST_"

_KEY_RE = re.compile(r"^[a-z][a-z0-9_]*(\.[a-z][a-z0-9_]*)*$")


def load_config(path: str) -> dict[str, str]:
    """Parse a key/value file into a flat dict of strings."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        hash_pos = line.find(" #")
        if hash_pos >= 0:
            line = line[:hash_pos].rstrip()
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"{path}:{lineno}: malformed key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        cfg[key] = value
    return cfg


def apply_env_overrides(cfg: dict[str, str], environ=None) -> dict[str, str]:
    """Overlay FUNEST_* environment variables onto a config dict."""
    environ = os.environ if environ is None else environ
    out = dict(cfg)
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower().replace("__", ".")
        if _KEY_RE.match(key):
            out[key] = value
    return out


def get_float(cfg: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number: {cfg[key]!r}") from exc


def get_int(cfg: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not an integer: {cfg[key]!r}") from exc


def get_bool(cfg: dict[str, str], key: str, default: bool | None = None) -> bool:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = cfg[key].lower()
    if value in ("true", "yes", "on", "1"):
        return True
    if value in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"key {key!r}: not a boolean: {cfg[key]!r}")


def get_str(cfg: dict[str, str], key: str, default: str | None = None,
            choices: tuple[str, ...] | None = None) -> str:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        value = default
    else:
        value = cfg[key]
    if choices is not None and value not in choices:
        raise ConfigError(f"key {key!r}: expected one of {choices}, got {value!r}")
    return value


def units_from_config(cfg: dict[str, str]) -> str:
    return get_str(cfg, "units", default="natural", choices=("natural", "si"))


def csl_from_config(cfg: dict[str, str], units: str) -> CslParams | None:
    """Build CslParams from the csl.* block, or None if absent."""
    if not any(k.startswith("csl.") for k in cfg):
        return None
    return CslParams(
        lambda_csl=get_float(cfg, "csl.lambda_csl"),
        r_c=get_float(cfg, "csl.r_c"),
        mass=get_float(cfg, "csl.mass"),
        alpha=get_float(cfg, "csl.alpha", default=1.0),
        hbar=get_float(cfg, "csl.hbar", default=default_hbar(units)),
    )


def physical_from_config(cfg: dict[str, str]) -> PhysicalParams:
    """Resolve the physical parameter set from a config dict.

    ``gamma_fun`` may be given directly or derived from the csl.*
    block via the collapse-rate mapping.
    """
    units = units_from_config(cfg)
    omega_m = get_float(cfg, "omega_m")
    gamma_env = get_float(cfg, "gamma_env")
    eta = get_float(cfg, "eta")
    if "gamma_fun" in cfg:
        gamma_fun = get_float(cfg, "gamma_fun")
    else:
        csl = csl_from_config(cfg, units)
        if csl is None:
            raise ConfigError("gamma_fun missing and no csl.* block to derive it")
        gamma_fun = gamma_fun_from_csl(csl, omega_m)
    return PhysicalParams(omega_m=omega_m, gamma_env=gamma_env,
                          gamma_fun=gamma_fun, eta=eta)
