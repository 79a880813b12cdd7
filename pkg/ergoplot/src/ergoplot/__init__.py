"""ergoplot: publication-style figures from ergokit experiment CSVs."""

from .reader import DataFileError, ExperimentData, Row, load
from .render import DEFAULT_COLORS, FigureKind, FigureSpec, RenderResult, render

__version__ = "0.1.0"
