"""
Sampled functions on a 2D periodic box.

The box is [-X, X) x [-Y, Y) with nx x ny equispaced samples.  Everything
downstream (curve averages, multipliers, norm estimation) consumes and
produces :class:`GridFunction2D` values.  Storage is always complex so
spectral operations never need a second code path.

Conventions:

* grid points ``x_i = -X + i*hx``, ``y_j = -Y + j*hy``;
* the partial transform in the second variable uses continuum frequencies
  ``eta_m = pi*m/Y`` (m the signed FFT bin) and is normalised so the
  rectangle-rule L2 norm is preserved exactly;
* off-grid evaluation wraps periodically, silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPATIAL = "spatial"
YSPECTRAL = "y-spectral"


class GridError(ValueError):
    """Invalid grid geometry or a function/grid mismatch."""


@dataclass(frozen=True)
class Grid2D:
    """Rectangular periodic grid on [-extent_x, extent_x) x [-extent_y, extent_y)."""

    extent_x: float
    extent_y: float
    nx: int
    ny: int

    @property
    def hx(self) -> float:
        return 2.0 * self.extent_x / self.nx

    @property
    def hy(self) -> float:
        return 2.0 * self.extent_y / self.ny

    @property
    def x(self) -> np.ndarray:
        return -self.extent_x + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return -self.extent_y + self.hy * np.arange(self.ny)

    @property
    def freq_x(self) -> np.ndarray:
        """Signed x-frequencies xi_p = pi*p/X, FFT bin order."""
        return np.fft.fftfreq(self.nx, d=self.hx) * 2.0 * np.pi

    @property
    def freq_y(self) -> np.ndarray:
        """Signed y-frequencies eta_m = pi*m/Y, FFT bin order."""
        return np.fft.fftfreq(self.ny, d=self.hy) * 2.0 * np.pi

    def cell_area(self) -> float:
        return self.hx * self.hy


def make_grid(extent_x: float, extent_y: float, nx: int, ny: int) -> Grid2D:
    """Validate and build a :class:`Grid2D`.

    Sample counts must be even and at least 8 (symmetric frequency grids,
    FFT-friendly sizes); extents must be positive and finite.
    """
    if not (np.isfinite(extent_x) and extent_x > 0):
        raise GridError(f"extent_x must be positive and finite, got {extent_x}")
    if not (np.isfinite(extent_y) and extent_y > 0):
        raise GridError(f"extent_y must be positive and finite, got {extent_y}")
    for name, n in (("nx", nx), ("ny", ny)):
        if n % 2 != 0:
            raise GridError(f"{name} must be even, got {n}")
        if n < 8:
            raise GridError(f"{name} must be >= 8, got {n}")
    return Grid2D(float(extent_x), float(extent_y), int(nx), int(ny))


class GridFunction2D:
    """Complex samples on a :class:`Grid2D`, tagged spatial or y-spectral.

    Values are frozen after construction; operators return new instances.
    """

    __slots__ = ("grid", "values", "tag")

    def __init__(self, grid: Grid2D, values: np.ndarray, tag: str = SPATIAL):
        values = np.ascontiguousarray(values, dtype=np.complex128)
        if values.shape != (grid.nx, grid.ny):
            raise GridError(
                f"values shape {values.shape} does not match grid ({grid.nx}, {grid.ny})"
            )
        if tag not in (SPATIAL, YSPECTRAL):
            raise GridError(f"unknown tag {tag!r}")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tag", tag)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction2D is immutable")

    def copy_with(self, values: np.ndarray, tag: str | None = None) -> "GridFunction2D":
        return GridFunction2D(self.grid, values, self.tag if tag is None else tag)


def from_function(grid: Grid2D, fn) -> GridFunction2D:
    """Sample ``fn(x, y)`` on the grid (fn must broadcast over meshgrids)."""
    xx, yy = np.meshgrid(grid.x, grid.y, indexing="ij")
    return GridFunction2D(grid, np.asarray(fn(xx, yy), dtype=np.complex128))


def lp_norm(F: GridFunction2D, p: float) -> float:
    """Rectangle-rule L^p norm.

    Spatial functions accept any p in [1, inf].  y-spectral functions are
    only measured at p = 2, where the transform normalisation makes the
    spectral rectangle rule equal the spatial one (Parseval).
    """
    if p != np.inf and p < 1:
        raise ValueError(f"p must satisfy p >= 1, got {p}")
    a = np.abs(F.values)
    if F.tag == YSPECTRAL:
        if p != 2:
            raise GridError("y-spectral functions only support the L2 norm")
        # weight per bin: hx * (d eta / 2 pi) = hx / (2 Y)
        w = F.grid.hx / (2.0 * F.grid.extent_y)
        return float(np.sqrt(np.sum(a * a) * w))
    if p == np.inf:
        return float(a.max()) if a.size else 0.0
    return float((np.sum(a**p) * F.grid.cell_area()) ** (1.0 / p))


def _alternating(n: int) -> np.ndarray:
    s = np.ones(n)
    s[1::2] = -1.0
    return s


def partial_fft_y(F: GridFunction2D) -> GridFunction2D:
    """Forward transform in y: F(x_i, y_j) -> Fhat(x_i, eta_m).

    ``Fhat[i, m] = hy * sum_j F[i, j] * exp(-i eta_m y_j)``, the rectangle
    rule for the continuum transform.  Exact inverse of
    :func:`partial_ifft_y`; preserves the rectangle-rule L2 norm.
    """
    if F.tag != SPATIAL:
        raise GridError("partial_fft_y expects a spatial function")
    g = F.grid
    # y_j = -Y + j*hy makes exp(-i eta_m y_j) = (-1)^m * DFT phase
    spec = g.hy * _alternating(g.ny)[None, :] * np.fft.fft(F.values, axis=1)
    return GridFunction2D(g, spec, YSPECTRAL)


def partial_ifft_y(F: GridFunction2D) -> GridFunction2D:
    """Inverse of :func:`partial_fft_y`."""
    if F.tag != YSPECTRAL:
        raise GridError("partial_ifft_y expects a y-spectral function")
    g = F.grid
    vals = np.fft.ifft(_alternating(g.ny)[None, :] * F.values, axis=1) / g.hy
    return GridFunction2D(g, vals, SPATIAL)


def _wrap_index(pos: np.ndarray, n: int):
    base = np.floor(pos).astype(np.int64)
    frac = pos - base
    i0 = np.mod(base, n)
    i1 = np.mod(base + 1, n)
    return i0, i1, frac


def sample_bilinear(F: GridFunction2D, x, y) -> np.ndarray:
    """Periodic 4-point bilinear interpolation at arbitrary (x, y)."""
    if F.tag != SPATIAL:
        raise GridError("sampling expects a spatial function")
    g = F.grid
    px = (np.asarray(x, dtype=float) + g.extent_x) / g.hx
    py = (np.asarray(y, dtype=float) + g.extent_y) / g.hy
    i0, i1, fx = _wrap_index(px, g.nx)
    j0, j1, fy = _wrap_index(py, g.ny)
    v = F.values
    return (
        (1 - fx) * (1 - fy) * v[i0, j0]
        + (1 - fx) * fy * v[i0, j1]
        + fx * (1 - fy) * v[i1, j0]
        + fx * fy * v[i1, j1]
    )


def _phase_matrix(pos: np.ndarray, n: int) -> np.ndarray:
    """exp(2 pi i k p / n) for signed bins k, with the Nyquist bin as cosine.

    ``pos`` is the continuous grid index (x + X)/hx; rows are evaluation
    points, columns FFT bins.
    """
    k = np.fft.fftfreq(n) * n  # signed bins, Nyquist at -n/2
    ph = np.exp(2j * np.pi * np.outer(pos, k) / n)
    # even n: the -n/2 bin stands for both +-Nyquist; interpolate with cos
    ph[:, n // 2] = np.cos(2.0 * np.pi * pos * (n // 2) / n)
    return ph


def sample_fourier(F: GridFunction2D, x, y) -> np.ndarray:
    """Exact trigonometric (band-limited) interpolation at arbitrary (x, y).

    Evaluates the unique trigonometric interpolant with symmetrised
    Nyquist modes; reproduces grid-resolved trigonometric polynomials to
    rounding error.  Cost O(nx*ny) per point.
    """
    if F.tag != SPATIAL:
        raise GridError("sampling expects a spatial function")
    g = F.grid
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        x, y = np.broadcast_arrays(x, y)
    shape = x.shape
    px = (x.ravel() + g.extent_x) / g.hx
    py = (y.ravel() + g.extent_y) / g.hy
    spec = np.fft.fft2(F.values)
    ex = _phase_matrix(px, g.nx)
    ey = _phase_matrix(py, g.ny)
    out = np.einsum("pn,nm,pm->p", ex, spec, ey, optimize=True) / (g.nx * g.ny)
    return out[0] if scalar else out.reshape(shape)


def sample_offgrid(F: GridFunction2D, x, y, scheme: str = "bilinear") -> np.ndarray:
    """Off-grid evaluation; ``scheme`` is 'bilinear' or 'fourier'."""
    if scheme == "bilinear":
        return sample_bilinear(F, x, y)
    if scheme == "fourier":
        return sample_fourier(F, x, y)
    raise ValueError(f"unknown sampling scheme {scheme!r}")


# ---------------------------------------------------------------------------
# serialization: CSV with header rows, one complex pair per entry, row-major
# ---------------------------------------------------------------------------

_CSV_MAGIC = "parabolab-gridfunction-v1"


def save_gridfunction(F: GridFunction2D, path) -> None:
    """Write the documented CSV format.

    Line 1: magic tag.  Line 2: ``nx,ny,extent_x,extent_y,tag``.  Then
    nx*ny lines ``re,im`` in row-major order, 17 significant digits.
    """
    g = F.grid
    with open(path, "w") as fh:
        fh.write(_CSV_MAGIC + "\n")
        fh.write(f"{g.nx},{g.ny},{float(g.extent_x)!r},{float(g.extent_y)!r},{F.tag}\n")
        flat = F.values.ravel()
        for z in flat:
            fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")


def load_gridfunction(path) -> GridFunction2D:
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != _CSV_MAGIC:
            raise GridError(f"not a grid-function CSV: bad magic {magic!r}")
        head = fh.readline().strip().split(",")
        nx, ny = int(head[0]), int(head[1])
        ex, ey = float(head[2]), float(head[3])
        tag = head[4]
        data = np.loadtxt(fh, delimiter=",", dtype=float)
    if data.shape != (nx * ny, 2):
        raise GridError(f"expected {nx * ny} value rows, got {data.shape}")
    vals = (data[:, 0] + 1j * data[:, 1]).reshape(nx, ny)
    return GridFunction2D(make_grid(ex, ey, nx, ny), vals, tag)
