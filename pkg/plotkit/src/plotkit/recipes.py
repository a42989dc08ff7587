"""Figure recipes: which columns each dataset must carry and how the
axes are drawn."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class SchemaError(Exception):
    """The input CSV does not carry the columns the figure needs."""


# Required columns per figure id (extra columns are fine).
REQUIRED_COLUMNS = {
    1: ("eta", "gamma_fun", "H_ss"),
    2: ("eta", "gamma_ratio", "FI", "QFI", "ratio"),
    3: ("eta", "lambda_csl", "M_runs"),
    4: ("t", "eta", "H_t", "H_ss", "ratio"),
}

# (x label, y label, y scale) defaults per figure.
_AXIS_DEFAULTS = {
    1: ("monitoring efficiency eta", "steady-state QFI", "linear"),
    2: ("monitoring efficiency eta", "gamma_fun / gamma_env", "log"),
    3: ("monitoring efficiency eta", "runs for unit SNR", "log"),
    4: ("time [s]", "QFI ratio H_t / H_ss", "linear"),
}

# Column whose distinct values define one curve per figure (figure 2 is
# a 2D map; its "family" is the y-axis grid).
FAMILY_KEYS = {1: "gamma_fun", 2: "gamma_ratio", 3: "lambda_csl", 4: "eta"}


@dataclass(frozen=True)
class FigureRecipe:
    """One rendering job: figure id, source CSV, axis cosmetics."""

    figure: int
    source: Path
    x_label: str = ""
    y_label: str = ""
    y_scale: str = ""
    family_key: str = field(default="")

    def __post_init__(self):
        if self.figure not in REQUIRED_COLUMNS:
            raise SchemaError(f"unknown figure id {self.figure!r}; expected 1..4")
        defaults = _AXIS_DEFAULTS[self.figure]
        if not self.x_label:
            object.__setattr__(self, "x_label", defaults[0])
        if not self.y_label:
            object.__setattr__(self, "y_label", defaults[1])
        if not self.y_scale:
            object.__setattr__(self, "y_scale", defaults[2])
        if not self.family_key:
            object.__setattr__(self, "family_key", FAMILY_KEYS[self.figure])

    @property
    def required_columns(self) -> tuple[str, ...]:
        return REQUIRED_COLUMNS[self.figure]
