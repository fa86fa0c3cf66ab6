"""
Empirical operator-norm estimation and decay measurement.

Norms are estimated FROM BELOW: max over sampled test functions of
||T f||_p / ||f||_p.  The harness never claims upper bounds -- it
measures stability, scale-uniformity and decay rates, which lower-bound
sweeps can falsify.  All randomness flows from one master seed through
``numpy.random.default_rng([seed, trial])``, so parallel and serial runs
agree exactly.

Samplers produce real test functions that the unit-scale band projection
leaves fixed (y-spectrum on the symbol's plateau), with smooth x-profiles
and hard-zeroed tails so the spectral and quadrature engines see the same
interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import operators, registry
from .bumps import standard_bump
from .fields import constant_field, field2_from_function
from .grid import Grid2D, GridFunction2D, from_function, lp_norm, make_grid

ADVERSARIAL_STEPS = 50
_ASCENT_FACTORS = (1.25, 0.8)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def plateau_bins(grid: Grid2D, profile=None, band_k: int = 0) -> np.ndarray:
    """FFT bin indices m with |eta_m| inside the scale-k symbol plateau."""
    profile = profile or standard_bump()
    s = 2.0**band_k
    eta = grid.freq_y
    return np.flatnonzero((np.abs(eta) >= profile.c * s)
                          & (np.abs(eta) <= profile.d * s))


def _normalize(F: GridFunction2D) -> GridFunction2D:
    n = lp_norm(F, 2)
    if n == 0:
        raise ValueError("sampler produced the zero function")
    return F.copy_with(F.values / n)


def random_bandlimited(grid: Grid2D, seed: int, trial: int,
                       band_k: int = 0) -> GridFunction2D:
    """Random real function with y-spectrum on the scale-k plateau band.

    x-spectrum: flat random band with a smooth taper over the top half and
    nothing above 3/4 of the Nyquist line, so the function is exactly
    band-limited in both variables with genuine high-frequency content.
    Envelope values below 1e-12 are zeroed outright, keeping the active
    mode set identical across trials.
    """
    from .bumps import smoothstep

    rng = np.random.default_rng([seed, trial])
    bins = plateau_bins(grid, band_k=band_k)
    if bins.size == 0:
        raise ValueError(f"grid does not resolve the scale-{band_k} plateau band")
    spec = np.zeros((grid.nx, grid.ny), dtype=np.complex128)
    p_cut = max(3, (3 * grid.nx) // 8)
    ps = np.arange(-p_cut, p_cut + 1)
    env = 1.0 - smoothstep((np.abs(ps) - p_cut / 2.0) / (p_cut / 2.0))
    env[env < 1e-12] = 0.0
    for m in bins:
        coeff = env * (rng.standard_normal(ps.size) + 1j * rng.standard_normal(ps.size))
        spec[ps % grid.nx, m] += coeff
    # hermitian symmetrise: real samples
    full = spec + np.conj(spec[(-np.arange(grid.nx)) % grid.nx, :]
                          [:, (-np.arange(grid.ny)) % grid.ny])
    vals = np.fft.ifft2(full)
    return _normalize(GridFunction2D(grid, vals))


def _band_project_exact(grid: Grid2D, vals: np.ndarray) -> np.ndarray:
    """Zero every y-mode off the plateau band (exact band limitation)."""
    bins = plateau_bins(grid)
    spec = np.fft.fft(vals, axis=1)
    keep = np.zeros(grid.ny, dtype=bool)
    keep[bins] = True
    spec[:, ~keep] = 0.0
    return np.fft.ifft(spec, axis=1)


def embed_bandlimited(F: GridFunction2D, target: Grid2D) -> GridFunction2D:
    """Resample a band-limited function onto a finer grid of the same box.

    Copies the spectrum mode-for-mode (signed bins), so the target samples
    the identical continuum function; used for grid-stability comparisons.
    """
    src = F.grid
    if (src.extent_x, src.extent_y) != (target.extent_x, target.extent_y):
        raise ValueError("embedding requires identical box extents")
    if target.nx < src.nx or target.ny < src.ny:
        raise ValueError("target grid must be at least as fine")
    spec = np.fft.fft2(F.values)
    out = np.zeros((target.nx, target.ny), dtype=np.complex128)
    ps = (np.fft.fftfreq(src.nx) * src.nx).astype(int)
    ms = (np.fft.fftfreq(src.ny) * src.ny).astype(int)
    out[np.ix_(ps % target.nx, ms % target.ny)] = spec
    out *= (target.nx * target.ny) / (src.nx * src.ny)
    return GridFunction2D(target, np.fft.ifft2(out))


def structured_catalog(grid: Grid2D, trial: int) -> GridFunction2D:
    """Fixed catalog: translated/modulated bumps and tensor products,

    band-projected onto the plateau so the unit-scale projection fixes
    them.  Indexed cyclically by trial.
    """
    X, Y = grid.extent_x, grid.extent_y
    plateau_eta = np.pi / Y * plateau_bins(grid)
    eta0 = float(np.abs(grid.freq_y[plateau_bins(grid)[0]])) if plateau_eta.size else 1.5
    shift = (trial % 5 - 2) * X / 8.0
    width = X / (4.0 + (trial % 3))

    def xprof(x):
        return np.exp(-(((x - shift) / width) ** 2))

    kind = trial % 3
    if kind == 0:
        fn = lambda x, y: xprof(x) * np.cos(eta0 * y)
    elif kind == 1:
        fn = lambda x, y: xprof(x) * np.sin(eta0 * y) * np.cos(2 * np.pi * x / X)
    else:
        fn = lambda x, y: xprof(x) * np.exp(-((y / (Y / 3)) ** 2)) * np.cos(eta0 * y)
    raw = from_function(grid, fn)
    return _normalize(GridFunction2D(grid, _band_project_exact(grid, raw.values)))


def make_sampler(name: str, grid: Grid2D, seed: int):
    if name in ("random_bandlimited", "adversarial"):
        return lambda trial: random_bandlimited(grid, seed, trial)
    if name == "structured":
        return lambda trial: structured_catalog(grid, trial)
    raise ValueError(f"unknown sampler {name!r}")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class OpReport:
    """Result of one norm-estimation run (a lower-bound sweep)."""

    op_id: str
    params: dict
    p: float
    sampler: str
    seed: int
    trials: int
    ratios: list = field(default_factory=list)
    norm_estimate: float = 0.0
    witness: GridFunction2D | None = None
    witness_trial: int = -1
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "op_id": self.op_id,
            "params": self.params,
            "p": self.p if self.p != np.inf else "inf",
            "sampler": self.sampler,
            "seed": self.seed,
            "trials": self.trials,
            "ratios": [float(r) for r in self.ratios],
            "norm_estimate": float(self.norm_estimate),
            "witness_trial": self.witness_trial,
            **self.extra,
        }


def _ratio(op_apply, F: GridFunction2D, p: float) -> float:
    fn = lp_norm(F, p)
    if fn == 0:
        return 0.0
    return lp_norm(op_apply(F), p) / fn


def estimate_opnorm(op_id: str, params, p: float, sampler: str, trials: int,
                    seed: int, grid: Grid2D) -> OpReport:
    """Lower-bound estimate of ||T||_{p->p} over sampled test functions.

    The adversarial sampler runs the random trials first, then up to
    ``ADVERSARIAL_STEPS`` deterministic coordinate-ascent evaluations on
    the best witness's active spectrum; every evaluation is recorded as a
    trial so the norm estimate stays the max of the per-trial ratios.
    """
    if p != np.inf and p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    op_apply = registry.build_operator(op_id, params, grid)
    draw = make_sampler(sampler, grid, seed)
    report = OpReport(op_id=op_id, params=dict(params or {}), p=p,
                      sampler=sampler, seed=seed, trials=0)
    params = params or {}
    report.extra["engine"] = params.get("engine", "auto")
    report.extra["scheme"] = params.get("scheme", "bilinear")
    best_f = None
    for trial in range(trials):
        F = draw(trial)
        r = _ratio(op_apply, F, p)
        report.ratios.append(r)
        if r >= report.norm_estimate:
            report.norm_estimate = r
            report.witness = F
            report.witness_trial = trial
            best_f = F
    if sampler == "adversarial" and best_f is not None:
        steps = _coordinate_ascent(op_apply, best_f, p, report)
        report.extra["ascent_evaluations"] = steps
    report.trials = len(report.ratios)
    return report


def _coordinate_ascent(op_apply, start: GridFunction2D, p: float,
                       report: OpReport) -> int:
    """Deterministic coordinate ascent over active spectral coordinates."""
    g = start.grid
    spec = np.fft.fft2(start.values)
    mag = np.abs(spec)
    order = np.argsort(mag.ravel())[::-1]
    active = [idx for idx in order[:ADVERSARIAL_STEPS] if mag.ravel()[idx] > 0]
    best = report.norm_estimate
    evals = 0
    for idx in active:
        if evals >= ADVERSARIAL_STEPS:
            break
        pi, mi = np.unravel_index(idx, spec.shape)
        for fac in _ASCENT_FACTORS:
            trial_spec = spec.copy()
            trial_spec[pi, mi] *= fac
            # keep hermitian symmetry: mirror coordinate scales too
            trial_spec[(-pi) % g.nx, (-mi) % g.ny] *= fac
            F = GridFunction2D(g, np.fft.ifft2(trial_spec))
            n2 = lp_norm(F, 2)
            if n2 == 0:
                continue
            F = F.copy_with(F.values / n2)
            r = _ratio(op_apply, F, p)
            report.ratios.append(r)
            evals += 1
            if r > best:
                best = r
                spec = trial_spec
                report.norm_estimate = r
                report.witness = F
                report.witness_trial = len(report.ratios) - 1
                break
            if evals >= ADVERSARIAL_STEPS:
                break
    return evals


# ---------------------------------------------------------------------------
# decay fits
# ---------------------------------------------------------------------------

@dataclass
class DecayFit:
    """Least-squares fit of log2(norm) against the dyadic index."""

    l_values: list
    norms: list
    gamma_hat: float
    intercept: float
    residual: float
    half_width: float
    used_l: list

    def summary(self) -> dict:
        return {
            "l_values": [float(l) for l in self.l_values],
            "norms": [float(n) for n in self.norms],
            "gamma_hat": float(self.gamma_hat),
            "intercept": float(self.intercept),
            "residual": float(self.residual),
            "half_width": float(self.half_width),
            "used_l": [float(l) for l in self.used_l],
        }


def _ls_line(ls: np.ndarray, ys: np.ndarray):
    A = np.vstack([np.ones_like(ls), ls]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    fitted = A @ coef
    resid = ys - fitted
    n = len(ls)
    rms = float(np.sqrt(np.mean(resid**2)))
    if n > 2:
        s2 = np.sum(resid**2) / (n - 2)
        sxx = np.sum((ls - ls.mean()) ** 2)
        se = float(np.sqrt(s2 / sxx)) if sxx > 0 else np.inf
    else:
        se = np.inf
    return coef[0], coef[1], rms, 1.96 * se, resid


def fit_decay(pairs, base: float = 2.0, drop_transient: bool = True) -> DecayFit:
    """Fit norm ~ base^{-gamma l}; needs >= 4 positive points.

    The decay is asymptotic in l, so the two smallest indices may sit in a
    transient regime.  They are excluded when their deviation from the
    tail fit (the line through the remaining points) exceeds 3x that
    fit's RMS residual; ``used_l`` records what survived.
    """
    pairs = sorted((float(l), float(n)) for l, n in pairs)
    if len(pairs) < 4:
        raise ValueError(f"need >= 4 points for a decay fit, got {len(pairs)}")
    ls = np.array([l for l, _ in pairs])
    ns = np.array([n for _, n in pairs])
    if np.any(ns <= 0):
        raise ValueError("decay fit needs positive norms")
    ys = np.log(ns) / np.log(base)
    icpt, slope, rms, hw, _ = _ls_line(ls, ys)
    used = ls
    if drop_transient and len(ls) >= 6:
        t_icpt, t_slope, t_rms, t_hw, _ = _ls_line(ls[2:], ys[2:])
        head_dev = np.abs(ys[:2] - (t_icpt + t_slope * ls[:2]))
        head_off = head_dev > 3.0 * max(t_rms, 1e-9)
        if np.any(head_off):
            keep = np.ones(len(ls), dtype=bool)
            keep[:2] = ~head_off
            icpt, slope, rms, hw, _ = _ls_line(ls[keep], ys[keep])
            used = ls[keep]
    return DecayFit(list(ls), list(ns), -slope, icpt, rms, hw, list(used))


def bootstrap_gamma(per_l_ratios: dict, n_boot: int, seed: int,
                    base: float = 2.0) -> tuple[float, float]:
    """Percentile 95% interval for the decay exponent.

    Resamples trials (with replacement) within each dyadic index, takes
    the per-index max as the norm estimate, refits.
    """
    rng = np.random.default_rng([seed, 0xB007])
    gammas = []
    ls = sorted(per_l_ratios)
    for _ in range(n_boot):
        pairs = []
        for l in ls:
            arr = np.asarray(per_l_ratios[l], dtype=float)
            res = arr[rng.integers(0, len(arr), len(arr))]
            pairs.append((l, float(res.max())))
        try:
            gammas.append(fit_decay(pairs, base=base, drop_transient=True).gamma_hat)
        except ValueError:
            continue
    lo, hi = np.percentile(gammas, [2.5, 97.5])
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def piece_scan_grid(l: int, u_max: float = 1.0, extent_y: float = 8.0,
                    ny: int = 16) -> Grid2D:
    """Resolution-matched grid for the dyadic piece at index l.

    The box holds the piece's t-window (outer edge 2.5 * 2^l / sqrt(u)),
    and the x-resolution reaches past the stationary-phase frequencies
    xi ~ 2 * eta * 2^l where the piece's norm actually lives; anything
    coarser only sees the super-exponential smooth-cutoff tail of the
    multiplier.  Cost grows like 4^l, so scans build one grid per index.
    """
    from scipy.fft import next_fast_len

    win = 2.0 ** int(l) / np.sqrt(u_max)
    extent_x = 5.5 * win
    nx = next_fast_len(int(max(64, np.ceil(14.0 * win * win * u_max))))
    nx += nx % 2
    return make_grid(extent_x, extent_y, nx, ny)


def decay_scan_pieces(grid: Grid2D | None, u_spec, l_range, p: float,
                      sampler: str, trials: int, seed: int, *,
                      kernel: str = "abs",
                      n_boot: int = 200) -> tuple[DecayFit, dict]:
    """Estimate the dyadic-piece norms over l and fit their decay.

    With ``grid=None`` each index gets its resolution-matched grid from
    :func:`piece_scan_grid` (u must then be a constant spec); passing one
    fixed grid restricts the measured norms to that grid's modes.
    """
    l_range = list(l_range)
    if len(l_range) < 4:
        raise ValueError("need at least 4 dyadic indices")
    per_l = {}
    reports = {}
    for l in l_range:
        if grid is None:
            u_max = float(u_spec) if isinstance(u_spec, (int, float)) \
                else float(u_spec.get("value", 1.0))
            g_l = piece_scan_grid(int(l), u_max)
        else:
            g_l = grid
        rep = estimate_opnorm("Tl", {"u": u_spec, "l": int(l), "kernel": kernel},
                              p, sampler, trials, seed + l, g_l)
        per_l[l] = rep.ratios
        reports[l] = rep
    fit = fit_decay([(l, reports[l].norm_estimate) for l in l_range])
    lo, hi = bootstrap_gamma(per_l, n_boot, seed)
    extra = {
        "bootstrap_ci": [lo, hi],
        "per_l_estimates": {str(l): reports[l].norm_estimate for l in l_range},
        "per_l_ratios": {str(l): [float(r) for r in per_l[l]] for l in l_range},
    }
    return fit, extra


def vdc_scan(u_vals, k_vals, eta_vals, profile=None, *, xi_points: int = 48) -> tuple[DecayFit, dict]:
    """Measure sup_xi |multiplier| against lambda = u * 2^{2k} * eta.

    The xi grid covers the stationary-phase window (where the sup lives)
    plus xi = 0.  Requires lambda to span at least 3 decades.
    """
    profile = profile or standard_bump()
    rows = []
    for u in u_vals:
        for k in k_vals:
            for eta in eta_vals:
                lam = abs(u) * 4.0**k * abs(eta)
                if lam <= 0:
                    raise ValueError("need positive u * 4^k * eta")
                # stationary xi* = -2 u eta t, |t| in support(phi_k)
                lo = 2.0 * lam * 2.0 ** (-k) * profile.a
                hi = 2.0 * lam * 2.0 ** (-k) * profile.b
                xis = np.concatenate([
                    [0.0], np.geomspace(0.5 * lo, 1.5 * hi, xi_points)])
                sup = 0.0
                for xi in xis:
                    for sgn in (1.0, -1.0):
                        m = abs(operators.multiplier_value(u, k, sgn * xi, eta,
                                                           profile))
                        sup = max(sup, m)
                rows.append((lam, sup))
    lams = np.array([r[0] for r in rows])
    if np.log10(lams.max() / lams.min()) < 3.0 - 1e-9:
        raise ValueError("lambda ladder must span at least 3 decades")
    pairs = [(np.log2(lam), sup) for lam, sup in rows]
    fit = fit_decay(pairs, base=2.0, drop_transient=False)
    return fit, {"rows": [(float(a), float(b)) for a, b in rows]}


def uniformity_sweep(k_range, p: float, trials: int, seed: int, *,
                     nx: int = 128, ny: int = 64, extent_x: float = 16.0,
                     base_extent_y: float = 8.0, u_spec=None,
                     avg_kmin: int = -4, avg_kmax: int = 0) -> dict:
    """Per-band norm estimates of the smoothed maximal average composed
    with the band projection, on anisotropically matched grids.

    Band k lives on the grid with extent_y scaled by 2^{-k} (the band's
    bins sit at fixed indices), the coefficient field stays fixed in
    absolute units, and samplers draw from the k-plateau, so uniform
    bounds in k show up as a max/min ratio near 1.
    """
    from . import operators
    from .registry import build_field

    if u_spec is None:
        u_spec = {"kind": "steps", "values": [0.7, 1.0, 1.4, 0.8]}
    profile = standard_bump()
    estimates = {}
    for k in k_range:
        grid_k = make_grid(extent_x, base_extent_y * 2.0 ** (-k), nx, ny)
        u = build_field(grid_k, u_spec)
        krange = range(avg_kmin, avg_kmax + 1)

        def op_apply(F, k=k, u=u, krange=krange):
            return operators.maximal_smoothed(
                operators.project_band(F, k, profile), u, profile, krange)

        best = 0.0
        for trial in range(trials):
            F = random_bandlimited(grid_k, seed + 1000 * (k + 50), trial,
                                   band_k=k)
            best = max(best, _ratio(op_apply, F, p))
        estimates[k] = best
    vals = np.array(list(estimates.values()))
    return {
        "per_k": {str(k): float(v) for k, v in estimates.items()},
        "max_min_ratio": float(vals.max() / vals.min()),
    }


def unit_ball_indicator(grid: Grid2D) -> GridFunction2D:
    return from_function(grid, lambda x, y: (x * x + y * y <= 1.0).astype(float))


def unboundedness_probe(levels: int, p: float = 2.0, *, base_extent: float = 16.0,
                        cells_per_unit: int = 4, adversarial: bool = True,
                        nodes: int = 192, f_builder=None) -> dict:
    """Growth of ||max average of the unit-ball indicator||_p under box doubling.

    The two-variable field y / max(|x|, 1)^2 aims a dyadic parabola at the
    ball from every point; a constant field is the control.  Each level
    doubles the box with the resolution held fixed, and the sharp maximal
    operator sweeps every dyadic scale that fits.  Levels whose input has
    zero norm are reported as skipped rather than as ratios.
    """
    f_builder = f_builder or unit_ball_indicator
    ratios = []
    skipped = []
    for lev in range(levels):
        L = base_extent * 2.0**lev
        n = int(2 * L * cells_per_unit)
        grid = make_grid(L, L, n, n)
        f = f_builder(grid)
        denom = lp_norm(f, p)
        if denom == 0:
            skipped.append(lev)
            continue
        if adversarial:
            u = field2_from_function(grid, lambda x, y: y / np.maximum(np.abs(x), 1.0) ** 2)
        else:
            u = constant_field(grid, 1.0)
        kmax = int(np.floor(np.log2(L / 2.0))) - 1
        M = operators.maximal_sharp(f, u, range(-2, kmax + 1), nodes=nodes)
        ratios.append(lp_norm(M, p) / denom)
    return {
        "levels": levels,
        "ratios": [float(r) for r in ratios],
        "skipped_levels": skipped,
        "strictly_increasing": bool(ratios) and
        all(b > a for a, b in zip(ratios, ratios[1:])),
        "max_rel_variation": float((max(ratios) - min(ratios)) / min(ratios))
        if ratios and min(ratios) > 0 else float("nan"),
    }
