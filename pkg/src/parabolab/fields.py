"""
Coefficient fields for the variable-parabola operators.

The curvature coefficient u can depend on x alone (one-variable, the case
with uniform operator bounds) or on both variables (used by the
unboundedness probe).  Scale fields assign an integer dyadic scale to each
grid point and turn the maximal operator into a linear one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid2D, GridError

ONE_VARIABLE = "one_variable"
TWO_VARIABLE = "two_variable"


@dataclass(frozen=True)
class FieldU:
    """Curvature coefficient field: samples on the x-grid or the full grid."""

    kind: str
    samples: np.ndarray

    def __post_init__(self):
        if self.kind not in (ONE_VARIABLE, TWO_VARIABLE):
            raise ValueError(f"unknown field kind {self.kind!r}")
        arr = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def is_constant(self) -> bool:
        return self.samples.min() == self.samples.max()

    def row_values(self, grid: Grid2D) -> np.ndarray:
        """Per-row u(x_i); only defined for one-variable fields."""
        if self.kind != ONE_VARIABLE:
            raise GridError("row_values needs a one-variable field")
        if self.samples.shape != (grid.nx,):
            raise GridError(
                f"field sampled on {self.samples.shape}, grid has nx={grid.nx}"
            )
        return self.samples

    def point_values(self, grid: Grid2D) -> np.ndarray:
        """u at every grid point, shape (nx, ny)."""
        if self.kind == ONE_VARIABLE:
            return np.broadcast_to(self.row_values(grid)[:, None], (grid.nx, grid.ny))
        if self.samples.shape != (grid.nx, grid.ny):
            raise GridError(
                f"field sampled on {self.samples.shape}, grid is ({grid.nx}, {grid.ny})"
            )
        return self.samples


def constant_field(grid: Grid2D, value: float) -> FieldU:
    return FieldU(ONE_VARIABLE, np.full(grid.nx, float(value)))


def field_from_function(grid: Grid2D, fn) -> FieldU:
    return FieldU(ONE_VARIABLE, np.asarray(fn(grid.x), dtype=float))


def field2_from_function(grid: Grid2D, fn) -> FieldU:
    xx, yy = np.meshgrid(grid.x, grid.y, indexing="ij")
    return FieldU(TWO_VARIABLE, np.asarray(fn(xx, yy), dtype=float))


@dataclass(frozen=True)
class ScaleField:
    """Integer dyadic scale k(x, y) per grid point, with its admissible range."""

    values: np.ndarray
    k_min: int
    k_max: int

    def __post_init__(self):
        arr = np.asarray(self.values)
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("scale field must be integer-valued")
        if arr.size and (arr.min() < self.k_min or arr.max() > self.k_max):
            raise ValueError("scale values outside declared range")
        arr = arr.astype(np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def check_fits(self, grid: Grid2D, outer_edge: float = 2.5) -> None:
        """Largest averaging window must stay inside half the box."""
        if outer_edge * 2.0**self.k_max >= grid.extent_x / 2.0:
            raise GridError(
                f"scale k_max={self.k_max} needs window {outer_edge * 2.0 ** self.k_max}"
                f" >= extent_x/2 = {grid.extent_x / 2.0}"
            )


def constant_scale(grid: Grid2D, k: int) -> ScaleField:
    return ScaleField(np.full((grid.nx, grid.ny), k, dtype=np.int64), k, k)


def case_mask(u: FieldU, kfield: ScaleField, grid: Grid2D) -> np.ndarray:
    """Boolean mask: True where u(x) * 2^{2 k(x,y)} <= 1 (ties included).

    True marks the perturbative regime compared against flat averages;
    False the oscillatory one handled by multiplier decay.
    """
    if u.kind != ONE_VARIABLE:
        raise GridError("case mask is defined for one-variable fields")
    uu = u.point_values(grid)
    return uu * np.exp2(2.0 * kfield.values) <= 1.0
