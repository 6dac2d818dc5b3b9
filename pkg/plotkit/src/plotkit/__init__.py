"""Render the documented sweep/LE CSV formats into publication-style
figures: line families, zero-centered heatmaps, and contour maps."""

__version__ = "0.1.0"

from .jobs import PRESETS, PlotJob, load_job
from .render import EmptyInput, MissingColumn, PlotResult, plot

__all__ = ["PlotJob", "load_job", "PRESETS", "plot", "PlotResult",
           "MissingColumn", "EmptyInput", "__version__"]
