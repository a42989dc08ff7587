"""Render funest figure CSVs into image files.

Usage:
    render --figure N --in data.csv --out fig.png

Rendering is a pure function of the CSV contents: fixed style, fixed
canvas, no timestamps, so identical inputs produce identical images.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib
import pandas as pd

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .recipes import FigureRecipe, SchemaError  # noqa: E402

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "plotkit",
}


def load_table(recipe: FigureRecipe) -> pd.DataFrame:
    """Read and schema-check the CSV behind a recipe."""
    try:
        df = pd.read_csv(recipe.source, comment="#")
    except FileNotFoundError as exc:
        raise SchemaError(f"input file not found: {recipe.source}") from exc
    except pd.errors.EmptyDataError as exc:
        raise SchemaError(f"{recipe.source}: empty file, no header row") from exc
    missing = [c for c in recipe.required_columns if c not in df.columns]
    if missing:
        raise SchemaError(
            f"{recipe.source}: missing required columns {missing} "
            f"for figure {recipe.figure} (found {list(df.columns)})"
        )
    if len(df) == 0:
        raise SchemaError(f"{recipe.source}: header only, no data rows")
    return df


def _plot_curves(ax, df, x, y, family, y_scale):
    # curve families come from the CSV grouping column, not from code
    for key, sub in sorted(df.groupby(family), key=lambda kv: kv[0]):
        sub = sub.dropna(subset=[y]).sort_values(x)
        if len(sub):
            ax.plot(sub[x], sub[y], marker=".", label=f"{family} = {key:g}")
    ax.set_yscale(y_scale)
    ax.legend()


def _build_fig1(recipe, df):
    fig, ax = plt.subplots()
    _plot_curves(ax, df, "eta", "H_ss", recipe.family_key, recipe.y_scale)
    ax.set_xlabel(recipe.x_label)
    ax.set_ylabel(recipe.y_label)
    return fig


def _build_fig2(recipe, df):
    fig, ax = plt.subplots()
    pivot = df.pivot_table(index="gamma_ratio", columns="eta", values="ratio")
    mesh = ax.pcolormesh(
        pivot.columns.to_numpy(),
        pivot.index.to_numpy(),
        pivot.to_numpy(),
        shading="nearest",
        vmin=0.0,
        vmax=1.0,
    )
    fig.colorbar(mesh, ax=ax, label="FI / QFI")
    ax.set_yscale(recipe.y_scale)
    ax.set_xlabel(recipe.x_label)
    ax.set_ylabel(recipe.y_label)
    return fig


def _build_fig3(recipe, df):
    fig, ax = plt.subplots()
    # run budgets span decades: logarithmic ordinate
    _plot_curves(ax, df, "eta", "M_runs", recipe.family_key, recipe.y_scale)
    ax.set_xlabel(recipe.x_label)
    ax.set_ylabel(recipe.y_label)
    return fig


def _build_fig4(recipe, df):
    fig, ax = plt.subplots()
    _plot_curves(ax, df, "t", "ratio", recipe.family_key, recipe.y_scale)
    ax.set_xlabel(recipe.x_label)
    ax.set_ylabel(recipe.y_label)
    # inset: absolute information content, logarithmic ordinate
    inset = ax.inset_axes([0.55, 0.14, 0.4, 0.38])
    _plot_curves(inset, df, "t", "H_t", recipe.family_key, "log")
    inset.get_legend().remove()
    inset.set_ylabel("H_t", fontsize=8)
    inset.tick_params(labelsize=7)
    return fig


_BUILDERS = {1: _build_fig1, 2: _build_fig2, 3: _build_fig3, 4: _build_fig4}


def build_figure(recipe: FigureRecipe, df: pd.DataFrame):
    """Build the matplotlib figure for a validated table."""
    with plt.rc_context(_STYLE):
        return _BUILDERS[recipe.figure](recipe, df)


def render(recipe: FigureRecipe, out: str | Path) -> Path:
    """Render a recipe to an image file and return its path."""
    df = load_table(recipe)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if out.suffix == ".svg" else {"Software": None}
    with plt.rc_context(_STYLE):
        fig = _BUILDERS[recipe.figure](recipe, df)
        try:
            fig.savefig(out, metadata=metadata)
        finally:
            plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a funest figure CSV to an image."
    )
    parser.add_argument("--figure", type=int, required=True, choices=(1, 2, 3, 4))
    parser.add_argument("--in", dest="source", required=True,
                        help="input CSV produced by 'funest figure N'")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    args = parser.parse_args(argv)
    try:
        recipe = FigureRecipe(figure=args.figure, source=Path(args.source))
        render(recipe, args.out)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
