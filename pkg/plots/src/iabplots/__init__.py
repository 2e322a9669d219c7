"""Turns iabsim sweep CSVs into static coverage figures with CI error bars."""

__version__ = "0.1.0"

from .render import FigureSpec, HeaderError, RenderError, load_figure_spec, render_figure

__all__ = [
    "FigureSpec",
    "HeaderError",
    "RenderError",
    "load_figure_spec",
    "render_figure",
]
