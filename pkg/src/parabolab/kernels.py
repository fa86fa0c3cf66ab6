"""
Backend selection for the hot quadrature kernels.

Prefers the compiled extension (``python setup.py build_ext --inplace``);
falls back to the vectorised NumPy implementation.  Set
``PARABOLAB_PURE_PYTHON=1`` to force the fallback.  Both backends are
bit-compatible up to floating-point associativity (tested to 1e-13).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("PARABOLAB_PURE_PYTHON", "") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl


def backend_name() -> str:
    return _impl.BACKEND


def parabolic_sum_rows(values: np.ndarray, hx: float, hy: float,
                       t_nodes: np.ndarray, weights: np.ndarray,
                       u_rows: np.ndarray) -> np.ndarray:
    """sum_q w_q * F(x_i - t_q, y_j - u_i t_q^2) on the whole grid.

    F is the periodic bilinear interpolant of ``values``; ``u_rows`` holds
    u(x_i).  Returns a new (nx, ny) complex array.
    """
    values = np.ascontiguousarray(values, dtype=np.complex128)
    t_nodes = np.ascontiguousarray(t_nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    u_rows = np.ascontiguousarray(u_rows, dtype=np.float64)
    if t_nodes.shape != weights.shape:
        raise ValueError("nodes and weights must have matching shapes")
    if u_rows.shape != (values.shape[0],):
        raise ValueError("u_rows must have one entry per grid row")
    out = np.zeros_like(values)
    _impl.parabolic_sum_rows(values, float(hx), float(hy), t_nodes, weights,
                             u_rows, out)
    return out


def parabolic_sum_points(values: np.ndarray, hx: float, hy: float,
                         t_nodes: np.ndarray, weights: np.ndarray,
                         u_points: np.ndarray) -> np.ndarray:
    """Same as :func:`parabolic_sum_rows` with u given per grid point."""
    values = np.ascontiguousarray(values, dtype=np.complex128)
    t_nodes = np.ascontiguousarray(t_nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    u_points = np.ascontiguousarray(u_points, dtype=np.float64)
    if t_nodes.shape != weights.shape:
        raise ValueError("nodes and weights must have matching shapes")
    if u_points.shape != values.shape:
        raise ValueError("u_points must match the grid shape")
    out = np.zeros_like(values)
    _impl.parabolic_sum_points(values, float(hx), float(hy), t_nodes, weights,
                               u_points, out)
    return out
