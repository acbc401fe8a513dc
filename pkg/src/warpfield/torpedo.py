"""Torpedo warping functions.

The base function f1 equals sin t up to the start of a transition window and
is constant afterwards.  On the window its derivative is cos(sigma(t)) * chi(t):
chi is a smooth cutoff acting on the second half of the window, and the phase
sigma(t) = t - lam * L * I(x) runs slightly slower than t, with I the integral
of the smooth step.  The single scalar lam is solved for so that f1 lands
exactly on the plateau value, which keeps f1 = sin t verbatim near 0 and makes
f1'' < 0 on the whole window.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from ._smooth import (
    cumulative_integral,
    partial_integral,
    smooth_step,
    smooth_step_complement,
    smooth_step_d1,
)
from .errors import ConstructionError, DomainError
from .profile import RadialProfile, curvature_certificate, default_grid, merge_mask

DEFAULT_WIDTH = np.pi / 8
CUT_FRACTION = 0.5
_PANELS = 256
TRANSITION_KNOTS = 256


_STEP_EDGES = np.linspace(0.0, 1.0, 1025)
_STEP_CUM = cumulative_integral(smooth_step, _STEP_EDGES)


def _step_integral(x):
    """I(x) = integral of the smooth step from 0 to x, for x in [0, 1]."""
    x = np.asarray(x, dtype=float)
    k = np.clip((x * 1024).astype(int), 0, 1023)
    return _STEP_CUM[k] + partial_integral(smooth_step, _STEP_EDGES[k], x)


@dataclass(frozen=True)
class TorpedoSpec:
    delta: float
    b: float
    smoothing_width: float = DEFAULT_WIDTH

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if not 0 < self.smoothing_width <= np.pi / 4:
            raise DomainError("smoothing width must lie in (0, pi/4]")
        if self.b < self.delta * np.pi / 2 * (1 - 1e-12):
            raise DomainError(f"b = {self.b} is below delta*pi/2 = {self.delta * np.pi / 2}")

    @property
    def cap_end(self):
        return self.delta * np.pi / 2

    @property
    def infinitesimal(self):
        """True for the variant that is only infinitesimally a product at b."""
        return abs(self.b - self.cap_end) <= 1e-12 * self.b


class CapFunction:
    """sin t on [0, a], smooth monotone concave transition on [a, e], plateau after e."""

    def __init__(self, a, e, plateau=1.0):
        if not 0 < a < e:
            raise ConstructionError("transition window must satisfy 0 < a < e")
        self.a, self.e, self.plateau = float(a), float(e), float(plateau)
        self.L = self.e - self.a
        self.edges = np.linspace(self.a, self.e, _PANELS + 1)
        target = self.plateau - np.sin(self.a)

        def area(lam):
            self.lam = lam
            return cumulative_integral(self._d1_window, self.edges)[-1] - target

        lo, hi = 0.0, 1.0 - 1e-9
        if area(lo) * area(hi) > 0:
            raise ConstructionError("no phase slowdown reaches the plateau; widen the window")
        self.lam = brentq(area, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
        self.cum = cumulative_integral(self._d1_window, self.edges)
        self._check()

    def _phase(self, t):
        x = (t - self.a) / self.L
        return t - self.lam * self.L * _step_integral(np.clip(x, 0, 1)), x

    def _chi(self, x):
        y = (x - (1 - CUT_FRACTION)) / CUT_FRACTION
        return smooth_step_complement(y), -smooth_step_d1(y) / (CUT_FRACTION * self.L)

    def _d1_window(self, t):
        sig, x = self._phase(t)
        chi, _ = self._chi(x)
        return np.cos(sig) * chi

    def evaluate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        f, f1, f2 = np.sin(t), np.cos(t), -np.sin(t)
        tail = t >= self.e
        f[tail], f1[tail], f2[tail] = self.plateau, 0.0, 0.0
        win = (t > self.a) & ~tail
        if np.any(win):
            tw = t[win]
            k = np.clip(((tw - self.a) / self.L * _PANELS).astype(int), 0, _PANELS - 1)
            f[win] = np.sin(self.a) + self.cum[k] + partial_integral(self._d1_window, self.edges[k], tw)
            sig, x = self._phase(tw)
            chi, dchi = self._chi(x)
            f1[win] = np.cos(sig) * chi
            f2[win] = -np.sin(sig) * (1 - self.lam * smooth_step(x)) * chi + np.cos(sig) * dchi
        return f, f1, f2

    def _check(self):
        t = np.linspace(0.0, self.e - 1e-3 * self.L, 4097)
        f, f1, f2 = self.evaluate(t)
        if np.any(f2[1:] >= 0):
            raise ConstructionError("transition is not strictly concave on the grid")
        if np.any(f1[:-1] <= 0):
            raise ConstructionError("transition is not strictly increasing")
        sig_end, _ = self._phase(np.array([self.e]))
        if sig_end[0] >= np.pi / 2:
            raise ConstructionError("phase reaches pi/2 before the plateau")


@lru_cache(maxsize=32)
def cap_function(width=DEFAULT_WIDTH, plateau=1.0, end=np.pi / 2):
    return CapFunction(np.pi / 2 - width, end, plateau)


def base_function_f1(smoothing_width=DEFAULT_WIDTH, t_max=np.pi):
    """f1 on [0, t_max] as a profile."""
    if not 0 < smoothing_width <= np.pi / 4:
        raise DomainError("smoothing width must lie in (0, pi/4]")
    cap = cap_function(smoothing_width)
    return _scaled(cap, 1.0, t_max, "f1")


def cap_knots(cap, delta, end, points=2048):
    """Default grid on [0, end] plus evenly spaced knots across the cap's transition window.

    The transition is a small fraction of the domain, and the plain grid leaves
    too few knots there for the interpolated f'' to stay on the concave side.
    """
    k = default_grid(end, points, r_first=1e-3 * min(end, delta))
    lo, hi = cap.a * delta, min(cap.e * delta, end)
    if hi > lo:
        k = np.union1d(k, np.linspace(lo, hi, TRANSITION_KNOTS + 1))
    return k[merge_mask(k)]


def _scaled(cap, delta, b, label, points=None):
    k = cap_knots(cap, delta, b, points or 2048)
    f, f1, f2 = cap.evaluate(k / delta)
    jet = (-1 / (6 * delta**2), 0.0, 1 / (120 * delta**4))
    return RadialProfile(
        k, delta * f, f1, f2 / delta, True, jet, 1e-3 * min(b, delta), label
    )


def torpedo_profile(spec, points=None):
    """f_delta(t) = delta * f1(t / delta) on [0, b]."""
    cap = cap_function(spec.smoothing_width)
    return _scaled(cap, spec.delta, spec.b, "torpedo", points)


def torpedo_like_profile(delta, b, plateau, end, smoothing_width=DEFAULT_WIDTH):
    """Torpedo-shaped profile whose plateau is ``plateau * delta`` reached at ``end * delta``.

    With plateau > 1 this is a round cap of radius delta on a slightly fattened neck.
    """
    cap = cap_function(smoothing_width, plateau, end)
    if b < end * delta:
        raise DomainError("domain ends before the plateau")
    return _scaled(cap, delta, b, "torpedo-like")


def torpedo_min_curvature(spec, n):
    return curvature_certificate(torpedo_profile(spec), n, margin=0.0).R_min


def is_torpedo_near_origin(p, tol=1e-6, smoothing_width=DEFAULT_WIDTH):
    """Return (delta, rho) if p agrees with a full torpedo cap on (0, rho], else None.

    delta is read from the cubic jet and refined on a knot inside the round
    region; rho is the largest knot up to which every knot matches within
    ``tol``.  A match that does not cover the whole cap is not a torpedo.
    """
    a3 = p.taylor[0]
    if not a3 < 0:
        return None
    d0 = 1.0 / np.sqrt(-6.0 * a3)
    k = p.knots
    inside = np.nonzero((k > 0.3 * d0) & (k < 0.9 * d0))[0]
    if len(inside) == 0 or d0 * np.pi / 2 > p.r_max * (1 + 1e-12):
        return None
    rk, fk = k[inside[-1]], p.values[inside[-1]]

    def mismatch(d):
        return d * np.sin(rk / d) - fk

    lo, hi = 0.8 * d0, 1.25 * d0
    if mismatch(lo) * mismatch(hi) > 0:
        return None
    delta = brentq(mismatch, lo, hi, xtol=1e-15, rtol=1e-15)
    cap = cap_function(smoothing_width)
    ref = delta * cap.evaluate(k / delta)[0]
    bad = np.nonzero(np.abs(p.values - ref) > tol)[0]
    last = len(k) - 1 if len(bad) == 0 else bad[0] - 1
    rho = float(k[last])
    if rho < delta * np.pi / 2 * (1 - 1e-9):
        return None
    return float(delta), rho
