"""figregen: turn the spin-control CLI's exported data files into figures.

This package deliberately has no in-process coupling to the simulation
library: it reads only the CSV/JSON files the `spinsteer all-figures`
command emits, so the numerical suite runs whether or not plotting is
installed.
"""

__version__ = "0.1.0"

from .render import FIGURE_IDS, FigureError, FigureSpec, render_figure

__all__ = ["FIGURE_IDS", "FigureError", "FigureSpec", "render_figure", "__version__"]
