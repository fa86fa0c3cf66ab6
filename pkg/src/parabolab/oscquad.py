"""
Quadrature for integrals with quadratic phase.

Everything here computes integrals of the form

    I(alpha, beta) = integral_a^b  w(t) * exp(i * (alpha * t^2 + beta * t)) dt

where the weight w is smooth (piecewise-analytic cutoffs, dt/t factors)
and the phase may run through many thousands of cycles.  Three regimes:

* small total phase sweep            -> Gauss-Legendre, node count tied
                                        to the sweep;
* large sweep, phase rate bounded
  away from zero on the panel        -> Levin collocation (Chebyshev
                                        spectral solve of p' + i phi' p = w,
                                        integral from the antiderivative
                                        endpoints) -- cost independent of
                                        the cycle count;
* stationary point inside the panel  -> split there and recurse; the
                                        neighbourhood of the stationary
                                        point has a small sweep and lands
                                        in the Gauss-Legendre branch.

The batched path (`oscillatory_weight_integrals`) evaluates one weight
against many (alpha, beta) pairs at once, grouping pairs into shared
Gauss rules and one batched Levin solve per segment.  This is what the
Fourier-multiplier builders call.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

# Gauss-Legendre handles a phase sweep of about (2*n - margin) radians at
# n nodes; stay conservative.
_GL_RAD_PER_NODE = 1.4
_GL_BASE_NODES = 32
_GL_MAX_NODES = 4096
_GL_BATCH_MAX_NODES = 512  # above this the batched path prefers Levin
_LEVIN_MIN_OMEGA = 40.0  # min |phi'| * half-length before Levin is trusted
# max |phi'| variation across a Levin panel: keeps the 1/phi' profile of the
# antiderivative inside the Chebyshev convergence region
_LEVIN_MAX_RATE_RATIO = 3.0

_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _gl_cache:
        _gl_cache[n] = leggauss(n)
    return _gl_cache[n]


def _cheb_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev-Lobatto points (descending from +1) and differentiation matrix."""
    if n < 2:
        raise ValueError("need at least 2 collocation points")
    N = n - 1
    x = np.cos(np.pi * np.arange(n) / N)
    c = np.ones(n)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n))
    D -= np.diag(D.sum(axis=1))
    return x, D


_cheb_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _cheb(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _cheb_cache:
        _cheb_cache[n] = _cheb_lobatto(n)
    return _cheb_cache[n]


def _phase(t, alpha, beta):
    return alpha * t * t + beta * t


_GL_PANEL = 64


def _gl_segment(weight, a: float, b: float, alpha, beta, n: int) -> np.ndarray:
    """Composite Gauss-Legendre on [a, b] with ~n nodes (64-point panels).

    alpha/beta may be arrays (shared nodes across the batch).
    """
    if n <= _GL_PANEL:
        x, w = _gl_rule(max(8, n))
        t = 0.5 * (a + b) + 0.5 * (b - a) * x
        wt = weight(t) * (0.5 * (b - a) * w)
    else:
        x, w = _gl_rule(_GL_PANEL)
        npan = int(np.ceil(n / _GL_PANEL))
        edges = np.linspace(a, b, npan + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wt = weight(t) * (half[:, None] * w[None, :]).ravel()
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    ph = np.exp(1j * (alpha[..., None] * t * t + beta[..., None] * t))
    return ph @ wt


def _levin_segment(weight, a: float, b: float, alpha: np.ndarray, beta: np.ndarray,
                   n_cheb: int = 24) -> np.ndarray:
    """Batched Levin collocation on [a, b] for arrays alpha, beta.

    Requires the phase rate 2*alpha*t + beta to be bounded away from zero
    on [a, b] for every batch element (caller's responsibility).
    """
    tau, D = _cheb(n_cheb)
    h = 0.5 * (b - a)
    t = 0.5 * (a + b) + h * tau
    g = np.asarray(weight(t), dtype=np.complex128)
    rate = 2.0 * alpha[:, None] * t[None, :] + beta[:, None]
    B = alpha.shape[0]
    A = np.broadcast_to(D / h, (B, n_cheb, n_cheb)).astype(np.complex128).copy()
    idx = np.arange(n_cheb)
    A[:, idx, idx] += 1j * rate
    p = np.linalg.solve(A, np.broadcast_to(g, (B, n_cheb))[..., None])[..., 0]
    ph_b = np.exp(1j * _phase(b, alpha, beta))
    ph_a = np.exp(1j * _phase(a, alpha, beta))
    return p[:, 0] * ph_b - p[:, -1] * ph_a


def _sweep(a: float, b: float, alpha, beta):
    """Total phase variation on [a, b] accounting for an interior extremum."""
    pa = _phase(a, alpha, beta)
    pb = _phase(b, alpha, beta)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = np.where(alpha != 0.0, -beta / (2.0 * alpha), np.inf)
    interior = (ts > a) & (ts < b)
    pstar = _phase(np.where(interior, ts, a), alpha, beta)
    lo = np.minimum(np.minimum(pa, pb), np.where(interior, pstar, pa))
    hi = np.maximum(np.maximum(pa, pb), np.where(interior, pstar, pa))
    return hi - lo


def integrate_quadratic_phase(weight, a: float, b: float, alpha: float, beta: float,
                              depth: int = 0) -> complex:
    """Scalar adaptive evaluation of one quadratic-phase integral.

    Splits at the stationary point, then bisects until each piece either
    has a small enough sweep for Gauss-Legendre or sustains Levin.
    """
    if b <= a:
        return 0.0 + 0.0j
    if alpha != 0.0:
        ts = -beta / (2.0 * alpha)
        if a < ts < b and depth < 60:
            return integrate_quadratic_phase(weight, a, ts, alpha, beta, depth + 1) + \
                integrate_quadratic_phase(weight, ts, b, alpha, beta, depth + 1)
    sweep = float(_sweep(a, b, alpha, beta))
    n_req = _GL_BASE_NODES + int(np.ceil(sweep / _GL_RAD_PER_NODE))
    if n_req <= _GL_MAX_NODES or depth >= 60:
        return complex(_gl_segment(weight, a, b, alpha, beta, min(n_req, _GL_MAX_NODES)))
    h = 0.5 * (b - a)
    ra = abs(2.0 * alpha * a + beta)
    rb = abs(2.0 * alpha * b + beta)
    omega = min(ra, rb) * h
    if omega >= _LEVIN_MIN_OMEGA and max(ra, rb) <= _LEVIN_MAX_RATE_RATIO * min(ra, rb):
        return complex(_levin_segment(weight, a, b, np.array([alpha]), np.array([beta]))[0])
    mid = 0.5 * (a + b)
    return integrate_quadratic_phase(weight, a, mid, alpha, beta, depth + 1) + \
        integrate_quadratic_phase(weight, mid, b, alpha, beta, depth + 1)


def oscillatory_weight_integrals(weight, segments, alpha: np.ndarray, beta: np.ndarray,
                                 n_cheb: int = 24) -> np.ndarray:
    """Batch-evaluate sum over segments of the quadratic-phase integral.

    Parameters
    ----------
    weight : callable
        Vectorised weight w(t); must be smooth (ideally analytic) on the
        interior of every segment.
    segments : sequence of (lo, hi)
        Disjoint pieces of the support, each on one side of t = 0.
    alpha, beta : arrays of shape (B,)
        Quadratic/linear phase coefficients per batch element.

    Returns
    -------
    (B,) complex array.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    out = np.zeros(alpha.shape, dtype=np.complex128)
    for (a, b) in segments:
        if b <= a:
            continue
        sweep = _sweep(a, b, alpha, beta)
        n_req = _GL_BASE_NODES + np.ceil(sweep / _GL_RAD_PER_NODE).astype(int)
        h = 0.5 * (b - a)
        ra = np.abs(2.0 * alpha * a + beta)
        rb = np.abs(2.0 * alpha * b + beta)
        omega = np.minimum(ra, rb) * h
        ratio_ok = np.maximum(ra, rb) <= _LEVIN_MAX_RATE_RATIO * np.minimum(ra, rb)
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = np.where(alpha != 0.0, -beta / (2.0 * alpha), np.inf)
        interior = (ts > a) & (ts < b)
        levin_ok = (~interior) & ratio_ok & (omega >= _LEVIN_MIN_OMEGA) & \
            (n_req > _GL_BATCH_MAX_NODES)
        gl_ok = (~levin_ok) & (n_req <= _GL_BATCH_MAX_NODES)
        scalar = ~(levin_ok | gl_ok)

        if np.any(gl_ok):
            # shared Gauss rules, one per node-count bucket
            req = n_req[gl_ok]
            buckets = np.clip(2 ** np.ceil(np.log2(req)).astype(int), 64, _GL_BATCH_MAX_NODES)
            idx_gl = np.flatnonzero(gl_ok)
            for nsize in np.unique(buckets):
                sel = idx_gl[buckets == nsize]
                out[sel] += _gl_segment(weight, a, b, alpha[sel], beta[sel], int(nsize))
        if np.any(levin_ok):
            sel = np.flatnonzero(levin_ok)
            out[sel] += _levin_segment(weight, a, b, alpha[sel], beta[sel], n_cheb)
        if np.any(scalar):
            for i in np.flatnonzero(scalar):
                out[i] += integrate_quadratic_phase(weight, a, b, float(alpha[i]),
                                                    float(beta[i]))
    return out


def dyadic_segments(lo: float, hi: float) -> list[tuple[float, float]]:
    """Split [lo, hi] at powers of two of the lower endpoint (for dt/t weights)."""
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got ({lo}, {hi})")
    cuts = [lo]
    c = lo
    while c * 2.0 < hi:
        c *= 2.0
        cuts.append(c)
    cuts.append(hi)
    return list(zip(cuts[:-1], cuts[1:]))


def split_segments_at(segments, knots) -> list[tuple[float, float]]:
    """Refine segments so every knot in their interior becomes an endpoint."""
    knots = sorted(set(float(k) for k in knots))
    out = []
    for (a, b) in segments:
        cuts = [a] + [k for k in knots if a < k < b] + [b]
        out.extend(zip(cuts[:-1], cuts[1:]))
    return out
