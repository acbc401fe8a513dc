"""Bent curves in the (t, r) half-plane and the hypersurface metrics they induce.

A curve is stored through its arc-length parameter l, measured from the point
where it meets the t-axis, as r(l), v(l) = dr/dl and v'(l).  Pushing out the
geodesic spheres of the rotationally symmetric fiber along the curve gives the
warping function l -> F(r(l)), with F the ambient profile.

The bent curve is produced from a tilted companion curve c_hat.  The companion
has the torpedo cap of radius delta blended with a straight line of slope eps,
so it is a graph over the r-axis.  Its two concave-upward bends are integrated
as ODEs whose rate is bounded so that every graph rescaling t -> sigma * t
keeps positive scalar curvature.  The actual curve c removes the tilt again
with a smooth cutoff H that is 1 up to the end of the neck and 0 from shortly
after.  Its cap is then exactly the torpedo of radius delta, followed by a
horizontal neck at height delta.

The homotopy from the vertical segment to c passes through the graphs
sigma * t_hat (sigma from 0 to 1) and then through the untilting family
indexed by eta (from eps to 0).  Both families are written in closed form in
terms of c_hat, so the seams between them are exact.
"""
from dataclasses import dataclass, field
from functools import cached_property
from math import sqrt

import numpy as np
from scipy.integrate import solve_ivp

from ._smooth import gauss_legendre, step_scalar
from .errors import (
    ConstructionError,
    ConstructionFailed,
    HypothesisError,
    PreconditionError,
    UsageError,
)
from .path import certify_family, constant_path, parallel_map
from .profile import RadialProfile, curvature_certificate, default_margin
from .torpedo import DEFAULT_WIDTH, cap_function

TILT_SCHEDULE = tuple(np.pi / k for k in (64, 32, 16, 8, 6, 5, 4, 3))
THETA_GRID = tuple(k * np.pi / 24 for k in range(1, 9))
BISECTIONS = 8
GAIN = 0.9
GATE_WIDTH = 0.01
EVENT_GAP = 1e-13
FIT_FRACTION = 0.95
GRAPH_PHASE = 0.75


def _check_dims(p, q):
    if q < 2:
        raise HypothesisError(f"the fiber sphere must have dimension q >= 2, got q = {q}")
    if p < 0:
        raise UsageError(f"p must be non-negative, got {p}")


# ---------------------------------------------------------------- tracks


class _Track:
    """Arc-length description of a curve: r, v = r', v' as functions of l."""

    length: float
    jet: tuple  # (b3, b5) of r(l) = l + b3 l^3 + b5 l^5 near the tip
    segments: tuple = ()

    def state(self, ell):
        raise NotImplementedError

    def knots(self):
        raise NotImplementedError


class _VerticalTrack(_Track):
    def __init__(self, rho_bar):
        self.length = float(rho_bar)
        self.jet = (0.0, 0.0)
        self.segments = (("vertical", 0.0, self.length),)

    def state(self, ell):
        ell = np.asarray(ell, dtype=float)
        return ell.copy(), np.ones_like(ell), np.zeros_like(ell)

    def knots(self):
        from .profile import default_grid

        return default_grid(self.length)


class _QuarterTrack(_Track):
    def __init__(self, rho_bar):
        self.rho = float(rho_bar)
        self.length = self.rho * np.pi / 2
        self.jet = (-1 / (6 * self.rho**2), 1 / (120 * self.rho**4))
        self.segments = (("terminal", 0.0, self.length),)

    def state(self, ell):
        x = np.asarray(ell, dtype=float) / self.rho
        return self.rho * np.sin(x), np.cos(x), -np.sin(x) / self.rho

    def knots(self):
        from .profile import default_grid

        return default_grid(self.length)


class _EtaTrack(_Track):
    def __init__(self, design, eta):
        self.design, self.eta = design, float(eta)
        self.length = design.top(eta)
        b = 1.0 - self.eta
        d = design.delta
        self.jet = (-b / (6 * d**2), b / (120 * d**4))
        self.segments = design.segments(eta)

    def state(self, ell):
        return self.design.eta_state(ell, self.eta)

    def knots(self):
        return self.design.grid(self.eta)


# ---------------------------------------------------------------- bend bound


def bend_rate_bound(v, F, F1, F2, p, q, cap, graphs=True):
    """Largest admissible v' for the companion curve at slope v and radius r.

    With a = v^2 and x in (0, 1] standing for the squared graph scaling, the
    curvature of every rescaled graph stays non-negative as long as
    v' * 2q F'/F <= min_x (C1/x + C2 + C3 x).  With ``graphs=False`` only
    x = 1, the curve itself, is constrained.
    """
    P = p * (p - 1)
    a = v * v
    b = 1.0 - a
    alpha = P + q * (q - 1) / (F * F)
    beta = q * (q - 1) * F1 * F1 / (F * F) + 2 * q * F2 / F
    c1 = a * a * (alpha - beta)
    c2 = a * b * (2 * alpha - beta)
    c3 = alpha * b * b
    if not graphs:
        g = c1 + c2 + c3
    elif c1 < 0:
        return 0.0
    else:
        if c3 > 0:
            x = min(1.0, sqrt(c1 / c3)) if c1 > 0 else 0.0
        else:
            x = 1.0
        g = c2 + c3 * x + (c1 / x if x > 0 else 0.0)
    k = 2 * q * F1 / F
    if k <= 0:
        return cap if g >= 0 else 0.0
    return float(min(max(g, 0.0) / k, cap))


# ---------------------------------------------------------------- design


def _run(rhs, l0, y0, target, rho_bar, ramp_start=None):
    """Integrate until the slope y[1] reaches target; None if r spills past the budget."""
    stop = lambda l, y: target - EVENT_GAP - y[1]  # noqa: E731
    stop.terminal = True
    stop.direction = -1
    spill = lambda l, y: FIT_FRACTION * rho_bar - y[0]  # noqa: E731
    spill.terminal = True
    sol = solve_ivp(
        rhs, (l0, l0 + 20 * rho_bar), y0, method="DOP853",
        events=(stop, spill), dense_output=True, rtol=1e-11, atol=1e-14,
    )
    if not (sol.status == 1 and len(sol.t_events[0]) > 0):
        return None
    return sol


def _gate(gap):
    return sqrt(min(1.0, gap / GATE_WIDTH)) if gap > 0 else 0.0


class _Bend:
    """Concave-upward bend of the companion curve from slope v0 up to target.

    Its rate respects the bound at the companion radius r (for all graph
    rescalings) and at the lowered radii r - shift of the untilted curves.
    """

    def __init__(self, design, l0, r0, v0, target, ramp, shift):
        self.design, self.l0, self.target, self.ramp, self.shift = design, l0, target, ramp, shift
        self.sol = _run(self.rhs, l0, [r0, v0], target, design.rho_bar)
        self.ok = self.sol is not None
        if self.ok:
            self.l1 = float(self.sol.t[-1])
            self.end = (float(self.sol.y[0, -1]), target)

    def rate(self, l, r, v):
        d = self.design
        bound = 1.0 / d.delta
        for lower, graphs in ((0.0, True), (0.5, False), (1.0, False)):
            bound = min(bound, d.bound(r - lower * self.shift, v, bound, graphs))
        return d.gain * step_scalar((l - self.l0) / self.ramp) * _gate(self.target - v) * bound

    def rhs(self, l, y):
        return [y[1], self.rate(l, y[0], y[1])]

    def state(self, ell):
        y = self.sol.sol(ell)
        rates = np.array([self.rate(*z) for z in zip(ell, y[0], y[1])])
        return y[0], y[1], rates


class _Untilt:
    """Slope of the bent curve rising from 0 to eps while the companion runs straight.

    Between the two, the untilting family interpolates slopes linearly, so the
    rate is bounded for the bent curve and for the halfway member.
    """

    def __init__(self, design, l0, r0, ramp):
        self.design, self.l0, self.ramp = design, l0, ramp
        self.r0 = r0
        self.sol = _run(self.rhs, l0, [design.delta, 0.0], design.eps, design.rho_bar)
        self.ok = self.sol is not None
        if self.ok:
            self.l1 = float(self.sol.t[-1])
            self.end = (float(self.sol.y[0, -1]), design.eps)

    def rate(self, l, r, v):
        d = self.design
        r_hat = self.r0 + d.eps * (l - self.l0)
        bound = 1.0 / d.delta
        for lam in (0.0, 0.5):
            vl = (1 - lam) * v + lam * d.eps
            rl = (1 - lam) * r + lam * r_hat
            bound = min(bound, d.bound(rl, vl, bound * (1 - lam), False) / (1 - lam))
        return d.gain * step_scalar((l - self.l0) / self.ramp) * _gate(d.eps - v) * bound

    def rhs(self, l, y):
        return [y[1], self.rate(l, y[0], y[1])]

    def state(self, ell):
        y = self.sol.sol(ell)
        rates = np.array([self.rate(*z) for z in zip(ell, y[0], y[1])])
        return y[0], y[1], rates


class _Design:
    """Companion curve and the two homotopy families built from it."""

    def __init__(self, ambient, p, q, delta, rho_bar, tilt, theta, gain=GAIN):
        self.ambient, self.p, self.q = ambient, p, q
        self.delta, self.rho_bar = float(delta), float(rho_bar)
        self.tilt, self.theta, self.gain = float(tilt), float(theta), float(gain)
        self.eps = eps = float(np.sin(tilt))
        self.cap = cap_function(DEFAULT_WIDTH)
        d = self.delta
        self.l_cap = d * np.pi / 2
        self.neck_len = d
        self.l2 = self.l_cap + self.neck_len
        self.tilted_len = 2 * d
        self.fits = False

        f = self.cap.evaluate(self.l2 / d)[0][0]
        self.r2 = (1 - eps) * d * f + eps * self.l2
        self.untilt = _Untilt(self, self.l2, self.r2, 0.5 * d)
        if not self.untilt.ok:
            return
        self.lb = self.untilt.l1
        rb = self.r2 + eps * (self.lb - self.l2)
        self.shift = rb - self.untilt.end[0]
        self.bend2 = _Bend(self, self.lb, rb, eps, np.cos(theta), d, self.shift)
        if not self.bend2.ok:
            return
        self.l3 = self.bend2.l1
        r3, v3 = self.bend2.end
        self.l4 = self.l3 + self.tilted_len
        r4 = r3 + v3 * self.tilted_len
        if r4 >= FIT_FRACTION * self.rho_bar:
            return
        self.bend1 = _Bend(self, self.l4, r4, v3, 1.0, 0.02 * self.rho_bar, self.shift)
        if not self.bend1.ok:
            return
        self.l5 = self.bend1.l1
        self.r5 = self.bend1.end[0]
        self.hat_top = self.l5 + (self.rho_bar - self.r5)
        self.vertical_len = self.rho_bar - self.r5
        self.fits = self.vertical_len >= (1 - FIT_FRACTION) * self.rho_bar

    def bound(self, r, v, cap, graphs):
        r = min(max(r, 1e-300), self.ambient.r_max)
        F, F1, F2 = self.ambient.evaluate_scalar(r)
        return bend_rate_bound(v, F, F1, F2, self.p, self.q, cap, graphs)

    def pieces(self, ell):
        """Companion (r, v, v'), its height above the bent curve D, and the cutoff H, H'."""
        ell = np.atleast_1d(np.asarray(ell, dtype=float))
        r, v, dv, D, H, dH = (np.zeros_like(ell) for _ in range(6))
        d, eps = self.delta, self.eps
        m = ell <= self.l2
        if np.any(m):
            f, f1, f2 = self.cap.evaluate(ell[m] / d)
            r[m] = (1 - eps) * d * f + eps * ell[m]
            v[m] = f1 + eps * (1 - f1)
            dv[m] = (1 - eps) * f2 / d
            D[m] = eps * (ell[m] - d * f)
            H[m] = 1.0
        m = (ell > self.l2) & (ell <= self.lb)
        if np.any(m):
            rc, vc, dvc = self.untilt.state(ell[m])
            r[m] = self.r2 + eps * (ell[m] - self.l2)
            v[m] = eps
            D[m] = r[m] - rc
            H[m] = (eps - vc) / (eps * (1 - vc))
            dH[m] = (eps - 1) * dvc / (eps * (1 - vc) ** 2)
        for bend, lo, hi in ((self.bend2, self.lb, self.l3), (self.bend1, self.l4, self.l5)):
            m = (ell > lo) & (ell <= hi)
            if np.any(m):
                r[m], v[m], dv[m] = bend.state(ell[m])
        m = (ell > self.l3) & (ell <= self.l4)
        if np.any(m):
            r3, v3 = self.bend2.end
            r[m] = r3 + v3 * (ell[m] - self.l3)
            v[m] = v3
        m = ell > self.l5
        if np.any(m):
            r[m] = self.r5 + (ell[m] - self.l5)
            v[m] = 1.0
        D[ell > self.lb] = self.shift
        return r, v, dv, D, H, dH

    def hat_state(self, ell):
        return self.pieces(ell)[:3]

    # -- untilting family; eta = eps is the companion, eta = 0 the bent curve
    def top(self, eta):
        return self.hat_top + (1 - eta / self.eps) * self.shift

    def eta_state(self, ell, eta, pieces=None):
        rh, vh, dvh, D, H, dH = self.pieces(ell) if pieces is None else pieces
        if eta == self.eps:
            return rh, vh, dvh
        u, du = self.eps * H, self.eps * dH
        v = (vh - u) / (1 - u)
        dv = (dvh * (1 - u) - du * (1 - vh)) / (1 - u) ** 2
        r = rh - (1 - eta / self.eps) * D
        return r, v + eta * H * (1 - v), dv * (1 - eta * H) + eta * dH * (1 - v)

    @cached_property
    def _base(self):
        d = self.delta
        parts = [
            [0.0],
            np.geomspace(1e-3 * d, 0.2 * d, 150),
            np.linspace(0.2 * d, self.l_cap, 300)[1:],
            np.linspace(self.l_cap, self.l2, 100)[1:],
            np.linspace(self.l2, self.lb, 300)[1:],
            np.linspace(self.lb, self.l3, 500)[1:],
            np.linspace(self.l3, self.l4, 60)[1:],
            np.linspace(self.l4, self.l5, 600)[1:],
        ]
        ell = np.concatenate(parts)
        return ell, self.pieces(ell)

    def grid(self, eta):
        return self.sampled(eta)[0]

    def sampled(self, eta):
        """Knots of the eta-member and the companion data on them."""
        ell, pc = self._base
        top = np.linspace(self.l5, self.top(eta), 200)[1:]
        extra = self.pieces(top)
        return np.concatenate([ell, top]), tuple(np.concatenate([a, b]) for a, b in zip(pc, extra))

    @cached_property
    def _speed_nodes(self):
        ell = self.grid(self.eps)
        x, w = gauss_legendre(8)
        h = np.diff(ell)[:, None]
        nodes = ell[:-1, None] + 0.5 * h * (x + 1)
        v = self.hat_state(nodes.ravel())[1].reshape(nodes.shape)
        return h[:, 0], w, v

    def graph_arc(self, sigma):
        """Arc length of the graph sigma * t_hat at the companion knots."""
        h, w, v = self._speed_nodes
        s2 = sigma * sigma
        return np.concatenate([[0.0], np.cumsum(0.5 * h * (np.sqrt(s2 + (1 - s2) * v * v) @ w))])

    def segments(self, eta):
        return (
            ("terminal", 0.0, self.l_cap),
            ("horizontal", self.l_cap, self.l2),
            ("bend2", self.l2, self.l3),
            ("tilted", self.l3, self.l4),
            ("bend1", self.l4, self.l5),
            ("vertical", self.l5, self.top(eta)),
        )

    # -- homotopy member (sigma, eta)
    def member(self, sigma, eta):
        """(arc, r, v, v') of the member; sigma < 1 is only used with eta = eps."""
        ell, pc = self.sampled(eta)
        r, v, dv = self.eta_state(ell, eta, pc)
        if sigma == 1.0:
            return ell, r, v, dv
        s2 = sigma * sigma
        Dn = s2 + (1 - s2) * v * v
        return self.graph_arc(sigma), r, v / np.sqrt(Dn), s2 * dv / Dn**2

    def profile(self, sigma, eta, ambient=None):
        """Warping function of the member pushed through ``ambient`` (default: the design's)."""
        ambient = self.ambient if ambient is None else ambient
        if sigma == 0.0:
            return ambient.restrict(self.rho_bar)
        b3, b5 = -(1 - eta) / (6 * self.delta**2), (1 - eta) / (120 * self.delta**4)
        jet = (b3, b5) if sigma == 1.0 else _graph_jet(b3, b5, sigma)
        return _compose(*self.member(sigma, eta), ambient, jet)

    def graph_second_derivative(self):
        """max of t_hat''(r) over the graph region of the companion curve."""
        _, _, v, dv = self.member(1.0, self.eps)
        m = v < 1 - 1e-9
        return float(np.max(dv[m] / (v[m] ** 3 * np.sqrt(1 - v[m] ** 2))))


def _graph_jet(b3, b5, sigma):
    """Tip jet of r(l_sigma) for the graph rescaled by sigma."""
    s2 = sigma * sigma
    d2 = (1 - s2) * 6 * b3
    d4 = (1 - s2) * (10 * b5 + 9 * b3 * b3)
    c3 = d2 / 6
    c5 = d4 / 10 - d2 * d2 / 40
    return (b3 - c3, 3 * c3 * c3 - c5 - 3 * b3 * c3 + b5)


def _compose(ell, r, v, dv, ambient, track_jet):
    F, F1, F2 = ambient.evaluate(np.clip(r, 0.0, ambient.r_max))
    A3, A4, A5 = ambient.taylor
    b3, b5 = track_jet
    jet = (b3 + A3, A4, b5 + 3 * A3 * b3 + A5)
    F = F.copy()
    F[0] = 0.0
    return RadialProfile(
        ell, F, F1 * v, F2 * v * v + F1 * dv, True, jet, float(ell[1]), "induced"
    )


# ---------------------------------------------------------------- public API


@dataclass(frozen=True)
class GLCurve:
    """Anatomy of a bent curve: segment lengths, bend (radius, angle) pairs, contact radius.

    ``bend1``/``bend2`` record the smallest radius of curvature on the bend and
    the angle it turns through.  The two degenerate members, the vertical
    segment and the quarter circle, have kind "vertical" and "quarter".
    """

    rho_bar: float
    vertical_len: float
    bend1: tuple
    tilt_angle: float
    tilted_len: float
    bend2: tuple
    horizontal_len: float
    contact_radius: float
    kind: str = "gl"
    graph_tilt: float = 0.0
    _track: _Track = field(default=None, repr=False, compare=False)

    @property
    def length(self):
        return self._track.length

    @property
    def segments(self):
        return self._track.segments

    @property
    def design(self):
        return getattr(self._track, "design", None)


def vertical_curve(rho_bar):
    """The segment from (0, 0) to (0, rho_bar)."""
    return GLCurve(rho_bar, rho_bar, (np.inf, 0.0), 0.0, 0.0, (np.inf, 0.0), 0.0, 0.0, "vertical",
                   _track=_VerticalTrack(rho_bar))


def quarter_circle_curve(rho_bar):
    """All straight segments of length 0: a quarter circle of radius rho_bar."""
    return GLCurve(rho_bar, 0.0, (np.inf, 0.0), 0.0, 0.0, (np.inf, 0.0), 0.0, rho_bar, "quarter",
                   _track=_QuarterTrack(rho_bar))


def _bend_descriptor(track, lo, hi, angle):
    ell = np.linspace(lo, hi, 400)
    _, v, dv = track.state(ell)
    kappa = np.abs(dv) / np.sqrt(np.clip(1 - v * v, 1e-300, None))
    return (float(1.0 / np.max(kappa)), float(angle))


def _curve_from_design(design):
    track = _EtaTrack(design, 0.0)
    return GLCurve(
        rho_bar=design.rho_bar,
        vertical_len=design.top(0.0) - design.l5,
        bend1=_bend_descriptor(track, design.l4, design.l5, design.theta),
        tilt_angle=design.theta,
        tilted_len=design.tilted_len,
        bend2=_bend_descriptor(track, design.l2, design.l3, np.pi / 2 - design.theta),
        horizontal_len=design.neck_len,
        contact_radius=design.delta,
        kind="gl",
        graph_tilt=design.tilt,
        _track=track,
    )


def arc_length_param(c, m=256):
    """Sample (l, t, r, r', r'') at m points, uniform in arc length from the tip.

    t is the horizontal distance from the top point (0, rho_bar), so the
    curve starts at t = 0, r = rho_bar and reaches the axis at the largest t.
    """
    if m < 64:
        raise UsageError("need at least 64 samples")
    tr = c._track
    ell = np.linspace(0.0, tr.length, m)
    r, v, dv = tr.state(ell)
    if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
        raise ConstructionError("curve is not monotone in r; degenerate parameters")
    x, w = gauss_legendre(10)
    h = np.diff(ell)[:, None]
    nodes = ell[:-1, None] + 0.5 * h * (x + 1)
    vv = tr.state(nodes.ravel())[1].reshape(nodes.shape)
    dt = 0.5 * h[:, 0] * (np.sqrt(np.clip(1 - vv * vv, 0, None)) @ w)
    t = np.concatenate([np.cumsum(dt[::-1])[::-1], [0.0]])
    return ell, t, r, v, dv


def curve_rows(c, m=512):
    """(segment, t, r) rows for CSV output."""
    ell, t, r, _, _ = arc_length_param(c, m)
    names = []
    for x in ell:
        name = c.segments[-1][0]
        for label, lo, hi in c.segments:
            if lo <= x <= hi:
                name = label
                break
        names.append(name)
    return list(zip(names, t, r))


def _refine(knots, times):
    for _ in range(times):
        mids = 0.5 * (knots[:-1] + knots[1:])
        knots = np.sort(np.concatenate([knots, mids]))
    return knots


def induced_profile(c, ambient, refine=0):
    """Warping function of the hypersurface swept along c, in its arc length.

    ``refine`` halves every knot interval that many times.
    """
    if c.rho_bar > ambient.r_max * (1 + 1e-12):
        raise PreconditionError("curve reaches beyond the ambient profile")
    if c.kind == "vertical":
        return ambient.restrict(c.rho_bar)
    tr = c._track
    ell = _refine(tr.knots(), refine)
    r, v, dv = tr.state(ell)
    return _compose(ell, r, v, dv, ambient, tr.jet)


def total_model_curvature(c, ambient, p, q, margin=None, refine=0):
    """Certificate of p(p-1) plus the fiber curvature in dimension q+1."""
    _check_dims(p, q)
    g = induced_profile(c, ambient, refine)
    delta = c.contact_radius or None
    return curvature_certificate(g, q + 1, margin=margin, offset=p * (p - 1), delta=delta)


def _score(cert):
    return cert.R_min - cert.margin


def build_gl_curve(ambient, p, q, target_delta, margin=None, rho_bar=None):
    """Search tilt and bend angle until the induced metric certifies.

    Returns (curve, certificate).  For each tilt in a fixed schedule the
    smallest fitting bend angle is located on a coarse grid and refined by
    bisection; the first certified curve wins.
    """
    _check_dims(p, q)
    rho_bar = ambient.r_max if rho_bar is None else float(rho_bar)
    if not 0 < target_delta < rho_bar:
        raise PreconditionError("target delta must lie in (0, rho_bar)")
    if rho_bar > ambient.r_max * (1 + 1e-12):
        raise PreconditionError("rho_bar exceeds the ambient domain")
    if target_delta * (np.pi / 2 + 3) > rho_bar:
        raise PreconditionError("target delta is too large for rho_bar")
    best = None
    for tilt in TILT_SCHEDULE:
        make = lambda th: _Design(ambient, p, q, target_delta, rho_bar, tilt, th)  # noqa: E731
        found, prev = None, None
        for th in THETA_GRID:
            d = make(th)
            if d.fits:
                found = d
                break
            prev = th
        if found is None:
            continue
        if prev is not None:
            lo, hi = prev, found.theta
            for _ in range(BISECTIONS):
                mid = 0.5 * (lo + hi)
                d = make(mid)
                if d.fits:
                    hi, found = mid, d
                else:
                    lo = mid
        curve = _curve_from_design(found)
        cert = total_model_curvature(curve, ambient, p, q, margin)
        if cert.passed:
            return curve, cert
        if best is None or _score(cert) > _score(best):
            best = cert
    if best is None:
        best = total_model_curvature(vertical_curve(rho_bar), ambient, p, q, margin)
    raise ConstructionFailed("no bend parameters certify", best)


def homotopy_schedule(steps):
    """(s, sigma, eta/eps) triples: graph homotopy first, then the untilt."""
    n1 = int(round(GRAPH_PHASE * steps))
    n2 = steps - n1
    out = []
    for i in range(steps + 1):
        if i <= n1:
            out.append((i / steps, i / n1, 1.0))
        else:
            out.append((i / steps, 1.0, 1.0 - (i - n1) / n2))
    return out, n1


def stage1_homotopy(c, ambient, p, q, steps=64, margin=None):
    """Certified path from the ambient metric (s = 0) to the metric induced by c (s = 1)."""
    _check_dims(p, q)
    if steps < 16:
        raise UsageError("stage 1 needs at least 16 steps")
    if c.kind == "vertical":
        return constant_path(ambient.restrict(c.rho_bar), p, q, steps, margin, None, label="graph")
    design = c.design
    if design is None:
        raise PreconditionError("only constructed bent curves carry a graph homotopy")
    sched, n1 = homotopy_schedule(steps)
    eps = design.eps

    def member(item):
        _, sigma, e = item
        if e == 0.0:
            return induced_profile(c, ambient)
        return design.profile(sigma, e * eps, ambient)

    profiles = parallel_map(member, sched)
    s = np.array([x[0] for x in sched])
    meta = {
        "theta": design.theta,
        "tilt": design.tilt,
        "sigma": [x[1] for x in sched],
        "eta": [x[2] * eps for x in sched],
    }
    return certify_family(
        profiles, s, p, q, None, margin, c.contact_radius,
        (("graph", 0, n1), ("untilt", n1, steps)), meta,
    )


def graph_curvature_profile(c, steps=64):
    """max t_s''(r) over the graph region at each s of the graph phase."""
    sched, n1 = homotopy_schedule(steps)
    base = c.design.graph_second_derivative()
    return np.array([x[0] for x in sched[: n1 + 1]]), np.array([x[1] * base for x in sched[: n1 + 1]])


def homotopy_radii(c, ell, steps=64):
    """r_s(l) at fixed arc lengths l for every s of the schedule (rows = s)."""
    d = c.design
    sched, _ = homotopy_schedule(steps)
    ell = np.asarray(ell, dtype=float)
    rows = []
    for _, sigma, e in sched:
        arc, r, _, _ = d.member(sigma, e * d.eps)
        rows.append(np.interp(ell, arc, r))
    return np.array(rows)


def default_curve_margin(q, delta):
    return default_margin(q + 1, delta)
