"""Independent brute-force oracles the tests compare against.

Everything here deliberately avoids the production evaluation paths:
pointwise interpolation plus dense quadrature, scipy.integrate on the
frozen cutoffs, direct enumeration for maximal functions.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from parabolab.grid import sample_offgrid


def quad_mass(fn, a, b, points=None, **kw):
    """scipy adaptive quadrature of fn over [a, b] (breakpoint-aware)."""
    val, err = quad(fn, a, b, limit=400, points=points, **kw)
    assert err < 1e-10
    return val


def dense_nodes(a, b, n):
    """Composite 32-point Gauss rule with ~n nodes on [a, b]."""
    pan = max(1, int(np.ceil(n / 32)))
    edges = np.linspace(a, b, pan + 1)
    x, w = leggauss(32)
    t = (0.5 * (edges[:-1] + edges[1:])[:, None]
         + 0.5 * np.diff(edges)[:, None] * x[None, :]).ravel()
    wt = (0.5 * np.diff(edges)[:, None] * w[None, :]).ravel()
    return t, wt


def parabolic_point_value(F, x, y, u_val, t_nodes, t_weights, scheme="fourier"):
    """sum_q w_q f(x - t_q, y - u t_q^2) at one point by off-grid sampling."""
    vals = sample_offgrid(F, x - t_nodes, y - u_val * t_nodes**2, scheme)
    return complex(np.sum(t_weights * vals))


def oracle_points(grid, count, seed=1234):
    """Deterministic sample of grid points for oracle comparisons."""
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, grid.nx, count)
    jj = rng.integers(0, grid.ny, count)
    return ii, jj


def oracle_strong_maximal_point(F, i, j, half_widths_x, half_widths_y):
    """Brute maximum of rectangle means of |F| centred at a grid point."""
    a = np.abs(F.values)
    nx, ny = a.shape
    best = 0.0
    for hw in half_widths_x:
        for hh in half_widths_y:
            rows = [(i + di) % nx for di in range(-hw, hw + 1)]
            cols = [(j + dj) % ny for dj in range(-hh, hh + 1)]
            sub = a[np.ix_(rows, cols)]
            best = max(best, sub.mean())
    return best


def fibered_piece_transform(F, u_rows, l, family, kernel="abs",
                            nodes_per_cycle=4.0):
    """Dyadic kernel piece computed row-by-row on the partial y-transform.

    For each row x_i and active frequency bin eta_m, integrates
    ``fhat(x_i - t, eta_m) * exp(-i u(x_i) t^2 eta_m) * psi_l(...) / t``
    (or /|t|) by dense Gauss quadrature that resolves every oscillation,
    interpolating fhat exactly through its x-band.  Returns the y-spectral
    result; completely independent of the multiplier machinery.
    """
    from parabolab.grid import GridFunction2D, YSPECTRAL, partial_fft_y

    g = F.grid
    u_rows = np.broadcast_to(np.asarray(u_rows, dtype=float), (g.nx,))
    spec_y = partial_fft_y(F).values            # (nx, ny)
    cx = np.fft.fft(spec_y, axis=0)             # x-DFT per bin
    assert np.abs(cx[g.nx // 2, :]).max() <= 1e-12 * max(np.abs(cx).max(), 1e-300)
    kx = g.freq_x
    live = np.flatnonzero(np.abs(spec_y).max(axis=0) >
                          1e-15 * np.abs(spec_y).max())
    out_hat = np.zeros((g.nx, g.ny), dtype=complex)
    mirror = -1.0 if kernel == "signed" else 1.0
    row_phase = np.exp(1j * np.outer(kx, g.x + g.extent_x)) / g.nx
    for u_val in np.unique(u_rows):
        rows = np.flatnonzero(u_rows == u_val)
        ru = np.sqrt(u_val)
        t_lo = family.plateau_edge * 2.0 ** (l - 1) / ru
        t_hi = family.support_edge * 2.0**l / ru
        for m in live:
            eta = g.freq_y[m]
            cycles = (abs(u_val * eta) * (t_hi**2 - t_lo**2)
                      + np.abs(kx).max() * (t_hi - t_lo)) / (2 * np.pi)
            t, w = dense_nodes(t_lo, t_hi, max(256, int(nodes_per_cycle * cycles)))
            wk = w * family.psi(l, ru * t) / t
            osc = np.exp(-1j * u_val * eta * t * t)
            phase_t = np.exp(-1j * np.outer(t, kx))
            d = cx[:, m][:, None] * row_phase[:, rows]   # (modes, |rows|)
            vals_plus = phase_t @ d                      # (nq, |rows|)
            vals_minus = np.conj(phase_t) @ d            # nodes at x_i + t_q
            out_hat[rows, m] = ((wk * osc) @ vals_plus
                                + mirror * (wk * osc) @ vals_minus)
    return GridFunction2D(g, out_hat, YSPECTRAL)


def oracle_truncated_hilbert_1d(gvals, hx, eps, R, n=4096, nodes_per_shell=None):
    """Direct quadrature of the truncated dt/t transform of a 1D sequence.

    With ``nodes_per_shell`` set, uses one 64-point-panel composite rule of
    that size on [eps, R] (matching the shell rules of the implementation);
    otherwise a dense composite rule with ~n nodes.
    """
    n_samp = len(gvals)
    if nodes_per_shell is not None:
        from numpy.polynomial.legendre import leggauss

        x, w0 = leggauss(64)
        npan = max(1, int(np.ceil(nodes_per_shell / 64)))
        pan = np.linspace(eps, R, npan + 1)
        half = 0.5 * (pan[1:] - pan[:-1])
        mid = 0.5 * (pan[1:] + pan[:-1])
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        w = (half[:, None] * w0[None, :]).ravel()
    else:
        t, w = dense_nodes(eps, R, n)
    idx = np.arange(n_samp, dtype=float)

    def samp(pos):
        base = np.floor(pos).astype(int)
        frac = pos - base
        return ((1 - frac) * gvals[np.mod(base, n_samp)]
                + frac * gvals[np.mod(base + 1, n_samp)])

    out = np.zeros(n_samp, dtype=complex)
    for tq, wq in zip(t, w):
        out += wq / tq * (samp(idx - tq / hx) - samp(idx + tq / hx))
    return out
