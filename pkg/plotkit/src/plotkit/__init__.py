"""Rendering of funest figure datasets (CSV in, image out)."""

__version__ = "0.1.0"

from .recipes import FigureRecipe, SchemaError
from .render import build_figure, load_table, render

__all__ = ["FigureRecipe", "SchemaError", "build_figure", "load_table", "render"]
