"""
Pure-NumPy fallback for the hot parabolic-quadrature kernels.

Same contracts as the compiled extension ``_kernels_cy``; selected by
``parabolab.kernels`` when the extension is unavailable.  The inner loop
is vectorised over (node, y) per grid row, with the periodic bilinear
gather done by fancy indexing.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

_Q_CHUNK = 256  # nodes per gather block, keeps index matrices small


def _x_offsets(t_nodes: np.ndarray, hx: float, nx: int):
    """Per-node x index offset and fraction for position i - t/hx."""
    dx = -t_nodes / hx
    off = np.floor(dx).astype(np.int64)
    frac = dx - off
    return off, frac


def parabolic_sum_rows(values: np.ndarray, hx: float, hy: float,
                       t_nodes: np.ndarray, weights: np.ndarray,
                       u_rows: np.ndarray, out: np.ndarray) -> None:
    """Accumulate sum_q w_q * F(x_i - t_q, y_j - u_i t_q^2) into out.

    F is the periodic bilinear interpolant of ``values``; u is constant
    along each row.
    """
    nx, ny = values.shape
    jj = np.arange(ny, dtype=np.int64)
    offx_all, fx_all = _x_offsets(t_nodes, hx, nx)
    t2 = t_nodes * t_nodes
    for q0 in range(0, len(t_nodes), _Q_CHUNK):
        sl = slice(q0, min(q0 + _Q_CHUNK, len(t_nodes)))
        offx, fx = offx_all[sl], fx_all[sl]
        w = weights[sl]
        t2c = t2[sl]
        for i in range(nx):
            ix0 = (i + offx) % nx
            ix1 = (ix0 + 1) % nx
            dy = -(u_rows[i] * t2c) / hy
            offy = np.floor(dy).astype(np.int64)
            fy = (dy - offy)[:, None]
            j0 = (jj[None, :] + offy[:, None]) % ny
            j1 = (j0 + 1) % ny
            row0 = (1.0 - fy) * values[ix0[:, None], j0] + fy * values[ix0[:, None], j1]
            row1 = (1.0 - fy) * values[ix1[:, None], j0] + fy * values[ix1[:, None], j1]
            row = (1.0 - fx)[:, None] * row0 + fx[:, None] * row1
            out[i, :] += w @ row


def parabolic_sum_points(values: np.ndarray, hx: float, hy: float,
                         t_nodes: np.ndarray, weights: np.ndarray,
                         u_points: np.ndarray, out: np.ndarray) -> None:
    """Like :func:`parabolic_sum_rows` with u varying per grid point."""
    nx, ny = values.shape
    jj = np.arange(ny, dtype=np.int64)
    offx_all, fx_all = _x_offsets(t_nodes, hx, nx)
    t2 = t_nodes * t_nodes
    for q0 in range(0, len(t_nodes), _Q_CHUNK):
        sl = slice(q0, min(q0 + _Q_CHUNK, len(t_nodes)))
        offx, fx = offx_all[sl], fx_all[sl]
        w = weights[sl]
        t2c = t2[sl]
        for i in range(nx):
            ix0 = (i + offx) % nx
            ix1 = (ix0 + 1) % nx
            dy = -np.outer(t2c, u_points[i, :]) / hy
            offy = np.floor(dy).astype(np.int64)
            fy = dy - offy
            j0 = (jj[None, :] + offy) % ny
            j1 = (j0 + 1) % ny
            row0 = (1.0 - fy) * values[ix0[:, None], j0] + fy * values[ix0[:, None], j1]
            row1 = (1.0 - fy) * values[ix1[:, None], j0] + fy * values[ix1[:, None], j1]
            row = (1.0 - fx)[:, None] * row0 + fx[:, None] * row1
            out[i, :] += w @ row
