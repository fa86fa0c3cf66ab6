"""
Dominating operators used to control the parabolic averages.

* the strong maximal function (sup of means over centred axis-parallel
  rectangles from a dyadic ladder, via 2D prefix sums -- exact in the grid
  measure);
* the 1D maximal truncated Hilbert transform (sup over a dyadic ladder of
  lower truncations);
* the residual between the parabolic and flat single-scale averages in
  the perturbative regime u * 2^{2k} <= 1, which the strong maximal
  function dominates for band-limited data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators
from .bumps import BumpProfile
from .fields import FieldU, ScaleField, case_mask, constant_field
from .grid import Grid2D, GridError, GridFunction2D, partial_fft_y

__all__ = [
    "RectangleLadder", "default_ladder", "strong_maximal",
    "maximal_hilbert_1d", "comparison_residual", "check_band_limited",
]


@dataclass(frozen=True)
class RectangleLadder:
    """Centred rectangles with integer half-widths (in cells) per axis.

    Half-width 0 is the single cell, so the strong maximal function
    dominates |F| pointwise by construction.
    """

    half_widths_x: tuple[int, ...]
    half_widths_y: tuple[int, ...]

    def __post_init__(self):
        if not self.half_widths_x or not self.half_widths_y:
            raise ValueError("ladder must be nonempty")
        if min(self.half_widths_x) < 0 or min(self.half_widths_y) < 0:
            raise ValueError("half-widths must be nonnegative")

    def check_fits(self, grid: Grid2D) -> None:
        if 2 * max(self.half_widths_x) + 1 > grid.nx or \
           2 * max(self.half_widths_y) + 1 > grid.ny:
            raise GridError("largest ladder rectangle exceeds the box")


def default_ladder(grid: Grid2D) -> RectangleLadder:
    """Dyadic half-widths 0, 1, 2, ... up to a quarter of each axis."""
    def dyadic_up_to(n):
        out, w = [0], 1
        while w <= n:
            out.append(w)
            w *= 2
        return tuple(out)

    return RectangleLadder(dyadic_up_to(grid.nx // 4), dyadic_up_to(grid.ny // 4))


def strong_maximal(F: GridFunction2D, ladder: RectangleLadder | None = None) -> GridFunction2D:
    """Max over ladder rectangles centred at each point of the mean of |F|."""
    g = F.grid
    if ladder is None:
        ladder = default_ladder(g)
    ladder.check_fits(g)
    a = np.abs(F.values)
    wx = max(ladder.half_widths_x)
    wy = max(ladder.half_widths_y)
    padded = np.pad(a, ((wx + 1, wx), (wy + 1, wy)), mode="wrap")
    P = padded.cumsum(axis=0).cumsum(axis=1)
    out = np.zeros_like(a)
    ii = np.arange(g.nx) + wx + 1
    jj = np.arange(g.ny) + wy + 1
    for hx_ in ladder.half_widths_x:
        for hy_ in ladder.half_widths_y:
            r0, r1 = ii - hx_ - 1, ii + hx_
            c0, c1 = jj - hy_ - 1, jj + hy_
            box = (P[np.ix_(r1, c1)] - P[np.ix_(r0, c1)]
                   - P[np.ix_(r1, c0)] + P[np.ix_(r0, c0)])
            mean = box / ((2 * hx_ + 1) * (2 * hy_ + 1))
            np.maximum(out, mean, out=out)
    return F.copy_with(out.astype(np.complex128))


def _sample_1d_periodic(vals: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """Periodic linear interpolation of a 1D sample array at grid positions."""
    n = len(vals)
    base = np.floor(pos).astype(np.int64)
    frac = pos - base
    i0 = np.mod(base, n)
    i1 = np.mod(base + 1, n)
    return (1.0 - frac) * vals[i0] + frac * vals[i1]


def maximal_hilbert_1d(gvals: np.ndarray, hx: float, eps_ladder, R0: float,
                       nodes_per_shell: int = 64) -> np.ndarray:
    """sup over eps in the ladder of |integral_{eps<=|t|<=R0} g(x-t) dt/t|.

    ``gvals`` lives on a periodic x-grid with spacing hx.  Shell integrals
    between consecutive ladder points are accumulated from the top, so all
    truncations come from one pass; nodes are exactly +-paired.
    """
    eps_sorted = sorted(float(e) for e in eps_ladder)
    if not eps_sorted or eps_sorted[-1] >= R0:
        raise ValueError("ladder must be nonempty with all eps < R0")
    gvals = np.asarray(gvals, dtype=np.complex128)
    n = len(gvals)
    edges = eps_sorted + [R0]
    from numpy.polynomial.legendre import leggauss

    x, w = leggauss(min(nodes_per_shell, 64))
    shells = []
    for (a, b) in zip(edges[:-1], edges[1:]):
        npan = max(1, int(np.ceil(nodes_per_shell / 64)))
        pan = np.linspace(a, b, npan + 1)
        half = 0.5 * (pan[1:] - pan[:-1])
        mid = 0.5 * (pan[1:] + pan[:-1])
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wt = (half[:, None] * w[None, :]).ravel() / t
        idx = np.arange(n, dtype=float)
        contrib = np.zeros(n, dtype=np.complex128)
        for tq, wq in zip(t, wt):
            contrib += wq * (_sample_1d_periodic(gvals, idx - tq / hx)
                             - _sample_1d_periodic(gvals, idx + tq / hx))
        shells.append(contrib)
    suffix = np.zeros(n, dtype=np.complex128)
    best = np.zeros(n, dtype=float)
    for contrib in reversed(shells):
        suffix += contrib
        np.maximum(best, np.abs(suffix), out=best)
    return best


def check_band_limited(F: GridFunction2D, profile: BumpProfile,
                       rel_tol: float = 1e-10) -> None:
    """Require the y-spectrum to live where the band symbol equals 1.

    This is the discrete form of 'the band projection at unit scale acts
    as the identity on F'; the comparison residual contract needs it.
    """
    spec = partial_fft_y(F)
    eta = np.abs(F.grid.freq_y)
    on_plateau = (eta >= profile.c) & (eta <= profile.d)
    total = np.sum(np.abs(spec.values) ** 2)
    if total == 0:
        return
    outside = np.sum(np.abs(spec.values[:, ~on_plateau]) ** 2)
    if outside > rel_tol * total:
        raise GridError(
            f"input is not band-limited to the unit plateau "
            f"(outside fraction {outside / total:.3e})"
        )


def comparison_residual(F: GridFunction2D, u: FieldU, kfield: ScaleField,
                        profile: BumpProfile, *, engine: str = operators.AUTO,
                        scheme: str = "bilinear",
                        nodes: int | None = None) -> GridFunction2D:
    """|parabolic - flat| single-scale average at each point's (u(x), k(x,y)).

    Only defined in the perturbative regime: raises if any point has
    u(x) * 2^{2 k(x,y)} > 1, or if F is not band-limited to the unit
    plateau in its second variable.
    """
    g = F.grid
    mask = case_mask(u, kfield, g)
    if not np.all(mask):
        raise GridError(
            f"comparison residual evaluated on {int((~mask).sum())} points "
            "with u * 2^{2k} > 1"
        )
    check_band_limited(F, profile)
    flat_u = constant_field(g, 0.0)
    out = np.zeros((g.nx, g.ny), dtype=float)
    for k in np.unique(kfield.values):
        sel = kfield.values == k
        parab = operators.single_scale_complex(F, u, int(k), profile,
                                               engine=engine, scheme=scheme,
                                               nodes=nodes)
        flat = operators.single_scale_complex(F, flat_u, int(k), profile,
                                              engine=engine, scheme=scheme,
                                              nodes=nodes)
        diff = np.abs(parab - flat)
        out[sel] = diff[sel]
    return F.copy_with(out.astype(np.complex128))
