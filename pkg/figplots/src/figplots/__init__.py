"""Figure rendering for covertlab sweep CSVs: a pure CSV -> image map."""

from .render import FIGURES, FigureSpec, SchemaError, render

__version__ = "0.1.0"

__all__ = ["FIGURES", "FigureSpec", "SchemaError", "render", "__version__"]
