"""Batch rendering of sgskill report directories.

Read-only: every number displayed is taken verbatim from the report's
CSV/JSON artifacts; nothing is recomputed here.
"""

from .figures import FIGURE_IDS, FigureSpec, FigureStyle, build_figure, load_report
from .render import RenderResult, render

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "FigureStyle",
    "RenderResult",
    "build_figure",
    "load_report",
    "render",
]

__version__ = "0.1.0"
