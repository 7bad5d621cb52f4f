"""Figure rendering for glwalk experiment CSVs."""

from .plots import KINDS, PlotJob, RenderResult, VizError, render

__all__ = ["KINDS", "PlotJob", "RenderResult", "VizError", "render"]
