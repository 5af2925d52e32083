"""Figure rendering for critbunch series files (plots only, no physics)."""

from .io import Series, SeriesError, read_series
from .render import FigureSpec, build_figure, fig2_spec, fig3_spec, fig4_spec, render

__all__ = [
    "FigureSpec",
    "Series",
    "SeriesError",
    "build_figure",
    "fig2_spec",
    "fig3_spec",
    "fig4_spec",
    "read_series",
    "render",
]
