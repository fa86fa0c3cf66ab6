# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled parabolic-quadrature kernels (bilinear periodic gather loops).

Mirrors the contracts in ``_kernels_py``; selected by ``parabolab.kernels``
at import when built.
"""

import numpy as np

cimport cython
from libc.math cimport floor

BACKEND = "cython"


def parabolic_sum_rows(const double complex[:, ::1] values, double hx, double hy,
                       const double[::1] t_nodes, const double[::1] weights,
                       const double[::1] u_rows, double complex[:, ::1] out):
    cdef Py_ssize_t nx = values.shape[0]
    cdef Py_ssize_t ny = values.shape[1]
    cdef Py_ssize_t nq = t_nodes.shape[0]
    cdef Py_ssize_t i, j, q, ix0, ix1, j0, j1, offy
    cdef double dx, fx, dy, fy, w, t2, gx0, gx1
    cdef double complex a, b
    cdef long off
    # per-node x offsets are row-independent
    offx_arr = np.empty(nq, dtype=np.int64)
    fx_arr = np.empty(nq, dtype=np.float64)
    cdef long[::1] offx = offx_arr
    cdef double[::1] fxv = fx_arr
    for q in range(nq):
        dx = -t_nodes[q] / hx
        off = <long>floor(dx)
        offx[q] = off
        fxv[q] = dx - off
    with nogil:
        for i in range(nx):
            for q in range(nq):
                w = weights[q]
                t2 = t_nodes[q] * t_nodes[q]
                ix0 = (i + offx[q]) % nx
                if ix0 < 0:
                    ix0 += nx
                ix1 = ix0 + 1
                if ix1 == nx:
                    ix1 = 0
                fx = fxv[q]
                gx0 = 1.0 - fx
                gx1 = fx
                dy = -(u_rows[i] * t2) / hy
                offy = <Py_ssize_t>floor(dy)
                fy = dy - floor(dy)
                offy = offy % ny
                if offy < 0:
                    offy += ny
                for j in range(ny):
                    j0 = j + offy
                    if j0 >= ny:
                        j0 -= ny
                    j1 = j0 + 1
                    if j1 == ny:
                        j1 = 0
                    a = (1.0 - fy) * values[ix0, j0] + fy * values[ix0, j1]
                    b = (1.0 - fy) * values[ix1, j0] + fy * values[ix1, j1]
                    out[i, j] = out[i, j] + w * (gx0 * a + gx1 * b)


def parabolic_sum_points(const double complex[:, ::1] values, double hx, double hy,
                         const double[::1] t_nodes, const double[::1] weights,
                         const double[:, ::1] u_points, double complex[:, ::1] out):
    cdef Py_ssize_t nx = values.shape[0]
    cdef Py_ssize_t ny = values.shape[1]
    cdef Py_ssize_t nq = t_nodes.shape[0]
    cdef Py_ssize_t i, j, q, ix0, ix1, j0, j1, offy
    cdef double dx, fx, dy, fy, w, t2, gx0, gx1
    cdef double complex a, b
    cdef long off
    offx_arr = np.empty(nq, dtype=np.int64)
    fx_arr = np.empty(nq, dtype=np.float64)
    cdef long[::1] offx = offx_arr
    cdef double[::1] fxv = fx_arr
    for q in range(nq):
        dx = -t_nodes[q] / hx
        off = <long>floor(dx)
        offx[q] = off
        fxv[q] = dx - off
    with nogil:
        for i in range(nx):
            for q in range(nq):
                w = weights[q]
                t2 = t_nodes[q] * t_nodes[q]
                ix0 = (i + offx[q]) % nx
                if ix0 < 0:
                    ix0 += nx
                ix1 = ix0 + 1
                if ix1 == nx:
                    ix1 = 0
                fx = fxv[q]
                gx0 = 1.0 - fx
                gx1 = fx
                for j in range(ny):
                    dy = -(u_points[i, j] * t2) / hy
                    fy = dy - floor(dy)
                    offy = (<Py_ssize_t>floor(dy)) % ny
                    if offy < 0:
                        offy += ny
                    j0 = j + offy
                    if j0 >= ny:
                        j0 -= ny
                    j1 = j0 + 1
                    if j1 == ny:
                        j1 = 0
                    a = (1.0 - fy) * values[ix0, j0] + fy * values[ix0, j1]
                    b = (1.0 - fy) * values[ix1, j0] + fy * values[ix1, j1]
                    out[i, j] = out[i, j] + w * (gx0 * a + gx1 * b)
