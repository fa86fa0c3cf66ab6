"""Numerical laboratory for maximal and singular averages along variable parabolas."""

__version__ = "0.1.0"

from .bumps import BumpProfile, DyadicPartition, build_bump, standard_bump
from .fields import FieldU, ScaleField, constant_field
from .grid import Grid2D, GridFunction2D, lp_norm, make_grid, sample_offgrid

__all__ = [
    "__version__",
    "BumpProfile", "DyadicPartition", "build_bump", "standard_bump",
    "FieldU", "ScaleField", "constant_field",
    "Grid2D", "GridFunction2D", "lp_norm", "make_grid", "sample_offgrid",
]
