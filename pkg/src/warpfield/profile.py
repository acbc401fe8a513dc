"""Warping functions f(r) and the scalar curvature of dr^2 + f(r)^2 ds^2_{n-1}.

A profile stores (f, f', f'') at strictly increasing knots starting at 0 and
interpolates with C^2 piecewise quintic Hermite polynomials.  Near the origin
both terms of the curvature formula are 0/0, so below a small threshold the
curvature is evaluated from the odd Taylor jet f = r + a3 r^3 + a4 r^4 + a5 r^5.
"""
import csv
from bisect import bisect_right
import io
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, InvalidProfileError, UsageError

DEFAULT_POINTS = 2048
SERIES_FRACTION = 1e-3


def default_grid(r_max, points=DEFAULT_POINTS, r_first=None):
    """Half the points geometric on [r_first, r_max/8], half linear beyond, plus 0."""
    if r_max <= 0:
        raise DomainError(f"r_max must be positive, got {r_max}")
    if r_first is None:
        r_first = SERIES_FRACTION * r_max
    r_first = min(r_first, r_max / 16)
    half = points // 2
    geo = np.geomspace(r_first, r_max / 8, half - 1)
    lin = np.linspace(r_max / 8, r_max, points - half + 1)[1:]
    return np.concatenate([[0.0], geo, lin])


def default_margin(n, delta=None):
    """Scale-aware strict-positivity margin 1e-6 * max(1, (n-1)(n-2)/delta^2)."""
    scale = 1.0 if delta is None else (n - 1) * (n - 2) / delta**2
    return 1e-6 * max(1.0, scale)


def _hermite_coefficients(x, f, d1, d2):
    h = np.diff(x)
    f0, f1 = f[:-1], f[1:]
    p0, p1 = d1[:-1] * h, d1[1:] * h
    q0, q1 = d2[:-1] * h * h, d2[1:] * h * h
    dv = f1 - f0
    c = np.empty((len(h), 6))
    c[:, 0] = f0
    c[:, 1] = p0
    c[:, 2] = 0.5 * q0
    c[:, 3] = 10 * dv - 6 * p0 - 4 * p1 - 1.5 * q0 + 0.5 * q1
    c[:, 4] = -15 * dv + 8 * p0 + 7 * p1 + 1.5 * q0 - q1
    c[:, 5] = 6 * dv - 3 * p0 - 3 * p1 - 0.5 * q0 + 0.5 * q1
    return h, c


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Warping function on [0, r_max] given by knot data.

    ``jet`` optionally pins the odd Taylor coefficients (a3, a4, a5) used
    below ``r_series``; otherwise they are read off the first interpolation
    segment.
    """

    knots: np.ndarray
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    origin_smooth: bool = True
    jet: tuple | None = None
    r_series: float | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        arrays = [np.array(a, dtype=float) for a in (self.knots, self.values, self.d1, self.d2)]
        k = arrays[0]
        if k.ndim != 1 or len(k) < 2:
            raise UsageError("a profile needs at least two knots")
        if any(a.shape != k.shape for a in arrays):
            raise UsageError("knot and value arrays differ in length")
        if k[0] != 0.0 or np.any(np.diff(k) <= 0):
            raise UsageError("knots must start at 0 and increase strictly")
        if not np.all(np.isfinite(np.concatenate(arrays))):
            raise InvalidProfileError("profile data contains non-finite values")
        for a in arrays:
            a.setflags(write=False)
        object.__setattr__(self, "knots", arrays[0])
        object.__setattr__(self, "values", arrays[1])
        object.__setattr__(self, "d1", arrays[2])
        object.__setattr__(self, "d2", arrays[3])
        if self.jet is not None:
            jet = tuple(float(a) for a in self.jet)
            if len(jet) == 2:
                jet = (jet[0], 0.0, jet[1])
            object.__setattr__(self, "jet", jet)
        rs = SERIES_FRACTION * k[-1] if self.r_series is None else float(self.r_series)
        object.__setattr__(self, "r_series", rs)
        if abs(self.values[0]) > 1e-12 * max(1.0, k[-1]):
            raise InvalidProfileError(f"f(0) = {self.values[0]} is not 0")
        bad = np.nonzero(self.values[1:] <= 0.0)[0]
        if len(bad):
            raise InvalidProfileError(
                f"f <= 0 at interior radius r = {k[1 + bad[0]]:.6g}"
            )

    @property
    def r_max(self):
        return float(self.knots[-1])

    @cached_property
    def _poly(self):
        return _hermite_coefficients(self.knots, self.values, self.d1, self.d2)

    @cached_property
    def taylor(self):
        """(a3, a4, a5) of the odd jet at the origin."""
        if self.jet is not None:
            return self.jet
        h, c = self._poly
        h0 = h[0]
        return (c[0, 3] / h0**3, c[0, 4] / h0**4, c[0, 5] / h0**5)

    @property
    def series_threshold(self):
        if self.jet is not None:
            return self.r_series
        return min(self.r_series, float(self.knots[1]))

    def evaluate(self, r):
        """Return (f, f', f'') at r (scalar or array)."""
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        tol = 1e-12 * self.r_max
        if np.any(r < -tol) or np.any(r > self.r_max + tol) or np.any(np.isnan(r)):
            raise DomainError(f"radius outside [0, {self.r_max}]")
        r = np.clip(r, 0.0, self.r_max)
        h, c = self._poly
        idx = np.clip(np.searchsorted(self.knots, r, side="right") - 1, 0, len(h) - 1)
        hh = h[idx]
        t = (r - self.knots[idx]) / hh
        cc = c[idx]
        f = cc[:, 0] + t * (cc[:, 1] + t * (cc[:, 2] + t * (cc[:, 3] + t * (cc[:, 4] + t * cc[:, 5]))))
        f1 = (cc[:, 1] + t * (2 * cc[:, 2] + t * (3 * cc[:, 3] + t * (4 * cc[:, 4] + t * 5 * cc[:, 5])))) / hh
        f2 = (2 * cc[:, 2] + t * (6 * cc[:, 3] + t * (12 * cc[:, 4] + t * 20 * cc[:, 5]))) / (hh * hh)
        at = np.searchsorted(self.knots, r)
        at = np.clip(at, 0, len(self.knots) - 1)
        hit = self.knots[at] == r
        if np.any(hit):
            f[hit] = self.values[at[hit]]
            f1[hit] = self.d1[at[hit]]
            f2[hit] = self.d2[at[hit]]
        if scalar:
            return float(f[0]), float(f1[0]), float(f2[0])
        return f, f1, f2

    @cached_property
    def _scalar_tables(self):
        h, c = self._poly
        return self.knots.tolist(), h.tolist(), c.tolist()

    def evaluate_scalar(self, r):
        """Fast (f, f', f'') at one radius inside the domain, for ODE right-hand sides."""
        knots, h, c = self._scalar_tables
        i = min(max(bisect_right(knots, r) - 1, 0), len(h) - 1)
        hh = h[i]
        t = (r - knots[i]) / hh
        c0, c1, c2, c3, c4, c5 = c[i]
        f = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))))
        f1 = (c1 + t * (2 * c2 + t * (3 * c3 + t * (4 * c4 + t * 5 * c5)))) / hh
        f2 = (2 * c2 + t * (6 * c3 + t * (12 * c4 + t * 20 * c5))) / (hh * hh)
        return f, f1, f2

    def __call__(self, r):
        return self.evaluate(r)[0]

    def scalar_curvature(self, n, r, offset=0.0):
        """Scalar curvature of the warped product in dimension n, plus ``offset``."""
        if n < 3:
            raise UsageError("dimension n must be at least 3")
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        f, f1, f2 = self.evaluate(r)
        out = np.empty_like(r)
        near = r < self.series_threshold
        far = ~near
        if np.any(far):
            ff, g1, g2 = f[far], f1[far], f2[far]
            if np.any(ff <= 0.0):
                bad = r[far][ff <= 0.0][0]
                raise InvalidProfileError(f"f <= 0 at interior radius r = {bad:.6g}")
            out[far] = -2 * (n - 1) * g2 / ff + (n - 1) * (n - 2) * (1.0 - g1 * g1) / (ff * ff)
        if np.any(near):
            out[near] = self._series_curvature(n, r[near])
        out = out + offset
        return float(out[0]) if scalar else out

    def _series_curvature(self, n, r):
        a3, a4, a5 = self.taylor
        if self.jet is None:
            h, c = self._poly
            a1 = c[0, 1] / h[0]
            a2 = c[0, 2] / h[0] ** 2
            if abs(a1 - 1.0) > 1e-8 or abs(a2) * h[0] > 1e-8:
                f, f1, f2 = self.evaluate(r)
                with np.errstate(divide="ignore", invalid="ignore"):
                    return -2 * (n - 1) * f2 / f + (n - 1) * (n - 2) * (1 - f1 * f1) / (f * f)
        p = 1.0 + a3 * r**2 + a4 * r**3 + a5 * r**4
        f2_over_r = 6 * a3 + 12 * a4 * r + 20 * a5 * r**2
        u = 3 * a3 * r**2 + 4 * a4 * r**3 + 5 * a5 * r**4
        defect = -(3 * a3 + 4 * a4 * r + 5 * a5 * r**2) * (2.0 + u)
        return -2 * (n - 1) * f2_over_r / p + (n - 1) * (n - 2) * defect / (p * p)

    def restrict(self, b):
        """The same function on [0, b]."""
        if not 0 < b <= self.r_max * (1 + 1e-12):
            raise DomainError(f"cannot restrict to [0, {b}]")
        b = min(b, self.r_max)
        keep = self.knots[self.knots < b]
        fb, d1b, d2b = self.evaluate(b)
        return RadialProfile(
            np.append(keep, b),
            np.append(self.values[: len(keep)], fb),
            np.append(self.d1[: len(keep)], d1b),
            np.append(self.d2[: len(keep)], d2b),
            self.origin_smooth,
            self.taylor,
            self.r_series,
            self.label,
        )

    def resample(self, knots):
        f, f1, f2 = self.evaluate(knots)
        return RadialProfile(knots, f, f1, f2, self.origin_smooth, self.taylor, self.r_series, self.label)

    def odd_extension_defect(self, m=64):
        """Max |f(r) + f(-r)| on (0, knots[1]] for the odd extension of the first segment."""
        h, c = self._poly
        t = np.linspace(0.0, 1.0, m + 1)[1:]
        even = c[0, 0] + c[0, 2] * t**2 + c[0, 4] * t**4
        return float(np.max(np.abs(2 * even)))

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "f", "d1", "d2"])
        for row in zip(self.knots, self.values, self.d1, self.d2):
            w.writerow([f"{x:.17g}" for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source):
        """Read a profile written by :meth:`to_csv` (path or text)."""
        text = source
        if "\n" not in str(source):
            with open(source) as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["r", "f", "d1", "d2"]:
            raise UsageError("profile CSV must have header r,f,d1,d2")
        try:
            data = np.array([[float(x) for x in row] for row in rows[1:] if row], dtype=float)
        except ValueError as exc:
            raise UsageError(f"unparsable profile CSV: {exc}") from None
        if data.ndim != 2 or data.shape[1] != 4:
            raise UsageError("profile CSV rows must have four columns")
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3])


@dataclass(frozen=True)
class CurvatureCertificate:
    dimension: int
    grid: np.ndarray
    R_values: np.ndarray
    margin: float
    offset: float = 0.0

    @property
    def R_min(self):
        return float(np.min(self.R_values))

    @property
    def r_min_location(self):
        return float(self.grid[int(np.argmin(self.R_values))])

    @property
    def passed(self):
        return bool(self.R_min > self.margin)

    def to_dict(self, include_grid=True):
        out = {
            "dimension": self.dimension,
            "margin": self.margin,
            "r_min_location": self.r_min_location,
            "R_min": self.R_min,
            "pass": self.passed,
        }
        if include_grid:
            out["grid"] = [{"r": float(r), "R": float(v)} for r, v in zip(self.grid, self.R_values)]
        return out

    def to_json(self, path=None, include_grid=True):
        text = json.dumps(self.to_dict(include_grid), indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def certificate_grid(profile):
    """Knots plus segment midpoints: every node of the interpolant and one interior probe."""
    k = profile.knots
    mids = 0.5 * (k[:-1] + k[1:])
    g = np.empty(2 * len(k) - 1)
    g[0::2] = k
    g[1::2] = mids
    return g


def eval_profile(p, r):
    return p.evaluate(r)


def scalar_curvature(p, n, r):
    return p.scalar_curvature(n, r)


def curvature_certificate(p, n, grid=None, margin=None, offset=0.0, delta=None):
    """Evaluate curvature on ``grid`` (default: knots and midpoints); pass iff min > margin."""
    if margin is None:
        margin = default_margin(n, delta)
    if margin < 0:
        raise UsageError("margin must be non-negative")
    g = certificate_grid(p) if grid is None else np.asarray(grid, dtype=float)
    R = p.scalar_curvature(n, g, offset=offset)
    return CurvatureCertificate(int(n), g, R, float(margin), float(offset))


def _blend_jet(p0, p1, s):
    if p0.jet is None or p1.jet is None:
        return None
    return tuple((1 - s) * a + s * b for a, b in zip(p0.jet, p1.jet))


MERGE_REL = 0.1


def merge_mask(k, rel=MERGE_REL):
    """Mask of knots to keep so that no gap is below ``rel`` times both neighbouring gaps.

    Knot sets merged from different sources can put two knots almost on top of
    each other; on such a sliver the Hermite coefficients lose most of their
    digits and the second derivative between the knots is garbage.  The first
    and last knots are always kept.
    """
    k = np.asarray(k, dtype=float)
    keep = np.ones(len(k), dtype=bool)
    while True:
        idx = np.nonzero(keep)[0]
        g = np.diff(k[idx])
        if len(g) < 2:
            return keep
        neighbour = np.minimum(np.concatenate(([np.inf], g[:-1])), np.concatenate((g[1:], [np.inf])))
        tiny = np.nonzero(g < rel * neighbour)[0]
        if len(tiny) == 0:
            return keep
        drop = tiny + 1
        drop[drop == len(idx) - 1] -= 1
        drop = drop[drop > 0]
        keep[idx[drop]] = False


def linear_blend(p0, p1, s):
    """Pointwise (1-s) p0 + s p1, resampled on the union of knots when needed."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"blend parameter {s} outside [0, 1]")
    if abs(p0.r_max - p1.r_max) > 1e-12 * max(p0.r_max, p1.r_max):
        raise DomainError("profiles have different domains")
    if s == 0.0:
        return p0
    if s == 1.0:
        return p1
    if len(p0.knots) == len(p1.knots) and np.array_equal(p0.knots, p1.knots):
        k, a, b = p0.knots, (p0.values, p0.d1, p0.d2), (p1.values, p1.d1, p1.d2)
    else:
        k = np.union1d(p0.knots, p1.knots[:-1])
        k = k[k <= p0.r_max]
        k[-1] = p0.r_max
        k = k[merge_mask(k)]
        a, b = p0.evaluate(k), p1.evaluate(k)
    vals = [(1 - s) * x + s * y for x, y in zip(a, b)]
    return RadialProfile(
        k, *vals,
        origin_smooth=p0.origin_smooth and p1.origin_smooth,
        jet=_blend_jet(p0, p1, s),
        r_series=min(p0.r_series, p1.r_series),
    )


def finite_diff_check(p, r, h=1e-4):
    """Max discrepancy between centred differences and the stored f', f''."""
    if r - h < 0 or r + h > p.r_max:
        raise DomainError("r +/- h must lie inside the domain")
    fm, dm, _ = p.evaluate(r - h)
    fp, dp, _ = p.evaluate(r + h)
    _, d1, d2 = p.evaluate(r)
    return max(abs((fp - fm) / (2 * h) - d1), abs((dp - dm) / (2 * h) - d2))


def profile_distance(a, b):
    """Sup-norm distance of f on the union of knots; inf if the domains differ."""
    if abs(a.r_max - b.r_max) > 1e-12 * max(a.r_max, b.r_max):
        return float("inf")
    if a is b:
        return 0.0
    k = np.union1d(a.knots, b.knots)
    k = k[k <= min(a.r_max, b.r_max)]
    return float(np.max(np.abs(a.evaluate(k)[0] - b.evaluate(k)[0])))


def from_function(fun, r_max, knots=None, jet=None, r_series=None, label=""):
    """Profile from a vectorized callable returning (f, f', f'')."""
    k = default_grid(r_max) if knots is None else np.asarray(knots, dtype=float)
    f, f1, f2 = fun(k)
    return RadialProfile(k, f, f1, f2, True, jet, r_series, label)


def flat_profile(r_max):
    """f(r) = r, the Euclidean disk."""
    return from_function(
        lambda r: (r, np.ones_like(r), np.zeros_like(r)), r_max, jet=(0.0, 0.0, 0.0), label="flat"
    )


def sine_profile(delta, r_max):
    """delta * sin(r / delta): round sphere cap of radius delta."""
    if not 0 < r_max < delta * np.pi:
        raise DomainError("sine profile needs 0 < r_max < delta*pi")

    def fun(r):
        x = r / delta
        return delta * np.sin(x), np.cos(x), -np.sin(x) / delta

    return from_function(
        fun, r_max, jet=(-1 / (6 * delta**2), 0.0, 1 / (120 * delta**4)), label="sine"
    )


def cubic_profile(a, r_max, b=0.0):
    """f(r) = r + a r^3 + b r^5."""

    def fun(r):
        return r + a * r**3 + b * r**5, 1 + 3 * a * r**2 + 5 * b * r**4, 6 * a * r + 20 * b * r**3

    return from_function(fun, r_max, jet=(a, 0.0, b), label="odd-quintic")
