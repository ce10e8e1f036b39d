"""Figure rendering for the simulator's delimited output files.

This package is deliberately decoupled from the simulator: it never imports
it and knows nothing about registers or Hamiltonians.  Everything it needs
arrives through the CSV files the ``nvsync`` command writes, so archived
output can be re-plotted years later without rebuilding the physics stack.
"""

from .figures import (
    KINDS,
    FigureRecipe,
    build_figure,
    grid_arrays,
    render,
    threshold_boundary,
    threshold_mask,
)
from .tables import SchemaError, Table, read_table

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "FigureRecipe",
    "SchemaError",
    "Table",
    "build_figure",
    "grid_arrays",
    "read_table",
    "render",
    "threshold_boundary",
    "threshold_mask",
    "__version__",
]
