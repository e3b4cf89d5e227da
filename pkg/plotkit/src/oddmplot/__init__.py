"""Figure rendering for simulator sweep CSV files."""

from .plots import (DISPLAY_FLOOR, KINDS, SCHEMA, PlotError, PlotSpec,
                    build_series, load_rows, make_figure, normalize_nmse,
                    render)

__all__ = ["DISPLAY_FLOOR", "KINDS", "SCHEMA", "PlotError", "PlotSpec",
           "build_series", "load_rows", "make_figure", "normalize_nmse",
           "render"]
