"""
Smooth cutoffs and the dyadic partition of unity.

Two families of cutoff live here:

* :class:`BumpProfile` -- an even bump vanishing outside ``[a, b]`` (in
  ``|t|``), identically 1 on the plateau ``[c, d]``, with an exact
  polynomial transition.  The kernel-weight bump used by the dyadic
  averaging operators is ``standard_bump()`` with support (1/2, 5/2) and
  plateau [1, 2]; its L1-normalised dilates carry the weight
  ``2^{-k} * bump(t / 2^k)``.

* :class:`DyadicPartition` -- height-1 annular cutoffs ``psi_l`` built by
  telescoping a single radial low-pass cutoff, so that
  ``sum_l psi_l(t) = 1`` holds exactly for every t != 0 (each member is
  supported in ``2^{l-1} <= |t| <= 5 * 2^{l-1}``).  The low cutoff itself
  (the sum over l <= 0) is available in closed form.

The transition is the degree-9 polynomial smoothstep, which is C^4 at the
joints, exactly 0/1 outside them, and has closed-form derivatives.  This
choice is frozen: derived constants (e.g. the bump mass) depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def smoothstep(x) -> np.ndarray:
    """C^4 monotone step: 0 for x <= 0, 1 for x >= 1, degree-9 polynomial between."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    x3 = x * x * x
    return x3 * x * x * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))))


def smoothstep_d1(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xc = np.where(inside, x, 0.0)
    x2 = xc * xc
    d = x2 * x2 * (630.0 + xc * (-2520.0 + xc * (3780.0 + xc * (-2520.0 + xc * 630.0))))
    return np.where(inside, d, 0.0)


def smoothstep_d2(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xc = np.where(inside, x, 0.0)
    d = xc**3 * (2520.0 + xc * (-12600.0 + xc * (22680.0 + xc * (-17640.0 + xc * 5040.0))))
    return np.where(inside, d, 0.0)


class BumpError(ValueError):
    """Inconsistent bump geometry."""


@dataclass(frozen=True)
class BumpProfile:
    """Even cutoff: 0 outside a <= |t| <= b, exactly 1 on c <= |t| <= d.

    ``smoothness`` counts the continuous derivatives guaranteed at the
    joints (4 for the frozen polynomial transition).
    """

    a: float
    b: float
    c: float
    d: float
    smoothness: int = 4

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def plateau(self) -> tuple[float, float]:
        return (self.c, self.d)

    def __call__(self, t) -> np.ndarray:
        s = np.abs(np.asarray(t, dtype=float))
        rising = smoothstep((s - self.a) / (self.c - self.a))
        falling = smoothstep((self.b - s) / (self.b - self.d))
        out = np.where(s < self.c, rising, falling)
        return np.where((s <= self.a) | (s >= self.b), 0.0, out)

    def deriv1(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        s = np.abs(t)
        sgn = np.sign(t)
        up = smoothstep_d1((s - self.a) / (self.c - self.a)) / (self.c - self.a)
        dn = -smoothstep_d1((self.b - s) / (self.b - self.d)) / (self.b - self.d)
        out = np.where(s < self.c, up, dn)
        return sgn * np.where((s <= self.a) | (s >= self.b), 0.0, out)

    def deriv2(self, t) -> np.ndarray:
        s = np.abs(np.asarray(t, dtype=float))
        up = smoothstep_d2((s - self.a) / (self.c - self.a)) / (self.c - self.a) ** 2
        dn = smoothstep_d2((self.b - s) / (self.b - self.d)) / (self.b - self.d) ** 2
        out = np.where(s < self.c, up, dn)
        return np.where((s <= self.a) | (s >= self.b), 0.0, out)

    def mass(self) -> float:
        """Exact integral over the line.

        The smoothstep is point-symmetric about 1/2, so each transition
        contributes half its width: integral = (c-a) + 2*(d-c) + (b-d).
        """
        return (self.c - self.a) + 2.0 * (self.d - self.c) + (self.b - self.d)


def build_bump(support: tuple[float, float], plateau: tuple[float, float]) -> BumpProfile:
    """Construct an even plateau bump; rejects inverted or touching intervals."""
    a, b = float(support[0]), float(support[1])
    c, d = float(plateau[0]), float(plateau[1])
    if not (0.0 < a < c < d < b):
        raise BumpError(f"need 0 < a < c < d < b, got a={a}, c={c}, d={d}, b={b}")
    return BumpProfile(a, b, c, d)


def standard_bump() -> BumpProfile:
    """The frozen kernel bump: support (1/2, 5/2), plateau [1, 2]."""
    return build_bump((0.5, 2.5), (1.0, 2.0))


def eval_phi_k(profile: BumpProfile, k: int, t) -> np.ndarray:
    """L1-normalised dyadic dilate ``2^{-k} * profile(t / 2^k)``."""
    s = 2.0**k
    return profile(np.asarray(t, dtype=float) / s) / s


@dataclass(frozen=True)
class DyadicPartition:
    """Exact dyadic partition of unity from a telescoped radial cutoff.

    The generating cutoff ``theta`` is even, 1 on |t| <= plateau_edge,
    0 outside |t| < support_edge, with the frozen polynomial transition.
    Members are ``psi_l(t) = theta(t / 2^l) - theta(t / 2^{l-1})``, so any
    finite sum telescopes and the full sum is exactly 1 away from 0.
    """

    plateau_edge: float = 1.0
    support_edge: float = 2.5

    def theta(self, t) -> np.ndarray:
        """The radial low-pass cutoff (equals the sum of psi_l over l <= 0)."""
        s = np.abs(np.asarray(t, dtype=float))
        width = self.support_edge - self.plateau_edge
        val = smoothstep((self.support_edge - s) / width)
        return np.where(s <= self.plateau_edge, 1.0, np.where(s >= self.support_edge, 0.0, val))

    def theta_deriv1(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        s = np.abs(t)
        width = self.support_edge - self.plateau_edge
        inside = (s > self.plateau_edge) & (s < self.support_edge)
        val = -smoothstep_d1((self.support_edge - s) / width) / width
        return np.where(inside, val, 0.0) * np.sign(t)

    def psi(self, l: int, t) -> np.ndarray:
        """Height-1 annular member supported on 2^{l-1} <= |t| <= 5*2^{l-1}.

        The difference of two transition evaluations can round to -1e-14
        where both dilates are mid-transition; clamp to keep the member
        nonnegative.
        """
        t = np.asarray(t, dtype=float)
        return np.maximum(self.theta(t / 2.0**l) - self.theta(t / 2.0 ** (l - 1)), 0.0)

    def psi_base(self, t) -> np.ndarray:
        """The l = 0 member (support [1/2, 5/2])."""
        return self.psi(0, t)

    def low_sum(self, t) -> np.ndarray:
        """Closed form of ``sum_{l <= 0} psi_l(t)`` (= theta, with value 1 at t = 0)."""
        return self.theta(t)

    def partial_sum(self, t, lmin: int, lmax: int) -> np.ndarray:
        """Telescoped ``sum_{l=lmin..lmax} psi_l(t)``, exact."""
        t = np.asarray(t, dtype=float)
        return self.theta(t / 2.0**lmax) - self.theta(t / 2.0 ** (lmin - 1))

    def support_of(self, l: int) -> tuple[float, float]:
        return (self.plateau_edge * 2.0 ** (l - 1), self.support_edge * 2.0**l)


def eval_psi_l(family: DyadicPartition, l: int, t) -> np.ndarray:
    return family.psi(l, t)


def eval_low_cutoff(family: DyadicPartition, t, tol: float = 1e-12) -> np.ndarray:
    """Sum of all members with l <= 0, by its closed telescoped form.

    ``tol`` is accepted for interface symmetry with direct summation; the
    closed form is exact, so it is unused.
    """
    del tol
    return family.low_sum(t)


def partition_mass_log(family: DyadicPartition) -> float:
    """Exact value of ``integral psi_l(t) dt / |t|`` (any l): 2 log 2.

    Substituting t -> 2t maps theta(t/2^l) to theta(t/2^{l-1}) without
    changing dt/t, so the one-sided mass telescopes to theta(0+) * log 2.
    """
    del family
    return 2.0 * np.log(2.0)
