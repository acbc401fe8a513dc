"""Deforming almost-standard warping functions w into torpedo form.

A warping function w on the tube factor is classified by where w' and w''
first vanish.  Depending on which comes first, relative to the standardness
radius rho_std, w is deformed by

* case 1: a linear blend on (0, rho_0] to the torpedo of radius w(rho_0);
* case 2: a local lift of w'' to zero at rho_0, then case 1;
* case 3: insertion of a neck just inside rho_0, then case 1 (which is then
  constant, since the neck already carries a torpedo);
* case 4: a lift creating a zero of w'' inside the window, then case 3.

Neck insertion replaces w on (0, r_J] by W: a steepening to slope s* <= 1, a
straight line, and a convex bend integrated towards the axis.  It ends
horizontally at height delta', where the torpedo of radius delta' takes over.
The bend rate keeps every blend (1-s) w + s W positive, so the single linear
path from w to W is positive by construction; the certificate confirms it.

All certificates are for the product with a unit round S^p, i.e. the fiber
curvature in dimension q+1 plus p(p-1).
"""
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ._smooth import bump, gauss_legendre, step_scalar
from .errors import HomotopyFailed, NotInAstdError, RetractFailed, UsageError
from .path import certify_family, constant_path
from .profile import RadialProfile, default_margin, linear_blend, merge_mask
from .torpedo import cap_function, cap_knots, DEFAULT_WIDTH, is_torpedo_near_origin

TIE_FRACTION = 1e-2
SLOPE_LIMIT = 0.1
NECK_EPS = (1 / 4, 1 / 8, 1 / 16, 1 / 2, 3 / 4)
NECK_SLOPES = (0.8, 0.9, 0.95, 1.0)
NECK_DROP = (0.9, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02)
NECK_GAINS = (0.8, 0.5)
GATE = 0.05
BLEND_SAMPLES = np.linspace(1 / 64, 1.0, 64)


@dataclass(frozen=True)
class ProfileClassification:
    rho_std: float
    rho_p0: float | None
    rho_pp0: float | None
    rho_0: float
    case_id: int

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RetractConfig:
    p: int = 2
    q: int = 2
    steps: int = 64
    margin: float | None = None
    zero_tol: float | None = None


# ---------------------------------------------------------------- classification


def _first_crossing(w, lo_idx, pred, column):
    """Refine the first knot index where pred holds to a point of the interpolant."""
    k = w.knots
    hits = np.nonzero(pred(column[lo_idx:]))[0]
    if len(hits) == 0:
        return None
    i = lo_idx + hits[0]
    if i == lo_idx:
        return float(k[i])
    a, b = k[i - 1], k[i]
    which = {id(w.d1): 1, id(w.d2): 2}[id(column)]
    for _ in range(60):
        m = 0.5 * (a + b)
        if pred(np.array([w.evaluate(m)[which]]))[0]:
            b = m
        else:
            a = m
    return float(b)


def _check_conditions(w, rho_std, tol):
    if abs(w.d1[0] - 1.0) > 1e-6:
        raise NotInAstdError("w'(0) must be 1")
    if not w.origin_smooth or w.odd_extension_defect() > 1e-8 * max(1.0, w.r_max):
        raise NotInAstdError("w is not odd at the origin")
    inside = w.knots <= rho_std * (1 + 1e-12)
    if np.any(w.d1[inside] < -tol):
        raise NotInAstdError("w' must be non-negative up to rho_std")
    near = (w.knots > 0) & (w.knots <= 0.05 * rho_std)
    if np.any(w.d2[near] > tol):
        raise NotInAstdError("w'' must be non-positive near the origin")


def classify(w, rho_std, zero_tol=None):
    """Locate the first zeros of w' and w'' and assign one of the four cases."""
    if not 0 < rho_std <= w.r_max * (1 + 1e-12):
        raise UsageError("rho_std must lie in (0, r_max]")
    rho_std = min(rho_std, w.r_max)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(w.d2)))) if zero_tol is None else zero_tol
    _check_conditions(w, rho_std, tol)
    k = w.knots
    start = int(np.searchsorted(k, w.r_series))
    rp = _first_crossing(w, start, lambda x: np.abs(x) <= tol, w.d1)
    neg = np.nonzero(w.d2[start:] < -tol)[0]
    rpp = None
    if len(neg):
        rpp = _first_crossing(w, start + neg[0], lambda x: x >= -tol, w.d2)
    if rp is not None and rp > rho_std:
        rp = None
    if rpp is not None and rpp > rho_std:
        rpp = None
    tie = TIE_FRACTION * rho_std
    if rp is not None and rpp is not None and abs(rp - rpp) <= tie:
        return ProfileClassification(rho_std, rp, rpp, min(max(rp, rpp), rho_std), 1)
    if rp is not None and (rpp is None or rp < rpp):
        return ProfileClassification(rho_std, rp, rpp, rp, 2)
    if rpp is not None:
        return ProfileClassification(rho_std, rp, rpp, rpp, 3)
    return ProfileClassification(rho_std, rp, rpp, rho_std, 4)


# ---------------------------------------------------------------- helpers


def _certify(profiles, s, p, q, margin, delta, stage, label):
    try:
        return certify_family(profiles, s, p, q, None, margin, delta, ((label, 0, len(profiles) - 1),))
    except HomotopyFailed as exc:
        raise RetractFailed(f"{stage}: {exc}", stage, exc.certificate) from None


def _blend_path(w, target, steps, p, q, margin, delta, stage):
    s = np.linspace(0.0, 1.0, steps + 1)
    return _certify([linear_blend(w, target, float(x)) for x in s], s, p, q, margin, delta, stage, stage)


def _torpedo_block(delta, end, points=768):
    """Torpedo of radius delta sampled on [0, end] with knots clustered at the tip."""
    cap = cap_function(DEFAULT_WIDTH)
    k = cap_knots(cap, delta, end, points)
    f, f1, f2 = cap.evaluate(k / delta)
    return k, delta * f, f1, f2 / delta


def _splice(blocks, tail, delta, label):
    """Concatenate knot blocks [(k, f, d1, d2), ...] and the tail of a profile."""
    ks, fs, d1s, d2s = [], [], [], []
    last = -1.0
    for k, f, d1, d2 in blocks + [tail]:
        keep = k > last + 1e-12 * max(1.0, abs(last))
        if not np.any(keep):
            continue
        ks.append(k[keep]); fs.append(f[keep]); d1s.append(d1[keep]); d2s.append(d2[keep])  # noqa: E702
        last = k[keep][-1]
    jet = (-1 / (6 * delta**2), 0.0, 1 / (120 * delta**4))
    k = np.concatenate(ks)
    m = merge_mask(k)
    return RadialProfile(
        k[m], np.concatenate(fs)[m], np.concatenate(d1s)[m], np.concatenate(d2s)[m],
        True, jet, 1e-3 * delta, label,
    )


def _tail(w, start):
    m = w.knots > start
    return w.knots[m], w.values[m], w.d1[m], w.d2[m]


def is_standard(w, tol=1e-6):
    return is_torpedo_near_origin(w, tol) is not None


# ---------------------------------------------------------------- case 1


def _fit_point(w, rho0):
    """First r >= rho0 with w(r)*pi/2 <= r, if it lies within the tie window.

    The first zero of w' is usually found a hair before the cap of radius
    w(rho0) closes, because w' is below the zero tolerance there already.
    """
    r = float(rho0)
    limit = min(w.r_max, rho0 * (1 + TIE_FRACTION))
    for _ in range(8):
        need = float(w(min(r, w.r_max))) * np.pi / 2
        if need <= r:
            return r
        r = need * (1 + 1e-12)
        if r > limit:
            return None
    return None


def torpedo_target(w, rho0):
    """Torpedo of radius w(rho0) on (0, rho0], w beyond.

    rho0 slides forward to the point where that torpedo closes when this stays
    within the tie window.
    """
    rho1 = _fit_point(w, rho0)
    if rho1 is None:
        return None
    delta = float(w(rho1))
    return _splice([_torpedo_block(delta, rho1)], _tail(w, rho1), delta, "torpedo-target")


def retract_case1(w, rho0, steps=64, margin=None, n=3, p=2):
    """Linear blend on (0, rho0] to the torpedo of radius w(rho0); constant if w is standard."""
    q = n - 1
    found = is_torpedo_near_origin(w)
    if found is not None and found[1] >= rho0 * (1 - 1e-9):
        return constant_path(w, p, q, steps, margin, None, label="case1")
    target = torpedo_target(w, rho0)
    if target is None:
        raise RetractFailed("torpedo of radius w(rho0) does not fit in (0, rho0]", "case1")
    return _blend_path(w, target, steps, p, q, margin, None, "case1")


# ---------------------------------------------------------------- lifts (cases 2 and 4)


def _lift(w, center, eps, two_sided):
    """w with w'' multiplied by k = 1 - b0 + sum(mu_i b_i) on the window around ``center``.

    b0 is a bump of half-width eps at center, so the new w'' vanishes there.
    The compensating bumps keep w'(center) and, for a two-sided window, the
    value and slope at the right edge, so the lift splices back into w.
    Returns None when k would turn negative.
    """
    a = center - eps
    b = center + eps if two_sided else center
    if a <= w.r_series or b > w.r_max * (1 + 1e-12):
        return None
    b = min(b, w.r_max)
    inner = w.knots[(w.knots > a) & (w.knots < b)]
    k = np.union1d(np.linspace(a, b, 801), inner)
    k[-1] = b
    k = k[merge_mask(k)]
    bumps = [lambda r: bump((r - center) / eps), lambda r: bump((r - center + eps / 2) / (eps / 2))]
    if two_sided:
        bumps += [lambda r: bump((r - center - eps / 4) / (eps / 4)), lambda r: bump((r - center - 3 * eps / 4) / (eps / 4))]
    x, wts = gauss_legendre(12)
    h = np.diff(k)[:, None]
    nodes = k[:-1, None] + 0.5 * h * (x + 1)
    flat = nodes.ravel()
    w2 = w.evaluate(flat)[2]
    B = [bf(flat) for bf in bumps]

    def panels(vals):
        return 0.5 * h[:, 0] * (vals.reshape(nodes.shape) @ wts)

    left = k[:-1] < center - 1e-15
    right = ~left

    def integral(vals, mask, weight=None):
        v = vals if weight is None else vals * weight
        return float(np.sum(panels(v)[mask]))

    mu = np.zeros(len(bumps))
    mu[0] = -1.0
    I0 = integral(w2 * B[0], left)
    I1 = integral(w2 * B[1], left)
    if I1 == 0.0:
        return None
    mu[1] = I0 / I1
    if two_sided:
        wb = b - flat
        base_s = integral(w2 * (-B[0] + mu[1] * B[1]), right)
        base_v = integral(w2 * (-B[0] + mu[1] * B[1]), left | right, wb)
        A = np.array([
            [integral(w2 * B[2], right), integral(w2 * B[3], right)],
            [integral(w2 * B[2], right, wb), integral(w2 * B[3], right, wb)],
        ])
        try:
            mu[2:] = np.linalg.solve(A, [-base_s, -base_v])
        except np.linalg.LinAlgError:
            return None
    fine = np.linspace(a, b, 4001)
    kk = 1.0 + sum(m * bf(fine) for m, bf in zip(mu, bumps))
    if np.min(kk) < -1e-12:
        return None

    def g(r):
        return w.evaluate(r)[2] * (1.0 + sum(m * bf(r) for m, bf in zip(mu, bumps)))

    gv = g(flat)
    I_g = np.concatenate([[0.0], np.cumsum(panels(gv))])
    I_tg = np.concatenate([[0.0], np.cumsum(panels(gv * flat))])
    fa, d1a, _ = w.evaluate(a)
    d1 = d1a + I_g
    f = fa + d1a * (k - a) + k * I_g - I_tg
    d2 = g(k)
    if two_sided:
        f[-1], d1[-1], d2[-1] = w.evaluate(b)
    head = w.knots < a
    tail = w.knots > b
    kk = np.concatenate([w.knots[head], k, w.knots[tail]])
    m = merge_mask(kk)
    return RadialProfile(
        kk[m],
        np.concatenate([w.values[head], f, w.values[tail]])[m],
        np.concatenate([w.d1[head], d1, w.d1[tail]])[m],
        np.concatenate([w.d2[head], d2, w.d2[tail]])[m],
        w.origin_smooth, w.taylor, w.r_series, "lifted",
    )


def lift_second_derivative(w, center, eps=None):
    """Search eps (halving) for a lift of w'' to zero at center.

    Returns (profile, eps, center); a center within 1e-6 r_max of the domain
    end is moved onto it and lifted one-sidedly.
    """
    if w.r_max - center <= 1e-6 * w.r_max:
        center = w.r_max
    two_sided = center < w.r_max
    eps = center / 4 if eps is None else eps
    if two_sided:
        eps = min(eps, w.r_max - center)
    for _ in range(12):
        lo, hi = center - eps, min(center + eps, w.r_max)
        window = w.evaluate(np.linspace(lo, hi, 201))[1]
        if np.max(np.abs(window)) < SLOPE_LIMIT or eps < 1e-6 * center:
            lifted = _lift(w, center, eps, two_sided)
            if lifted is not None:
                return lifted, eps, center
        eps /= 2
    return None, None, center


def retract_case2(w, classification, steps=64, margin=None, n=3, p=2):
    """Lift w'' to zero at rho_0 keeping w'' <= 0, then blend to the torpedo."""
    q = n - 1
    lifted, eps, rho0 = lift_second_derivative(w, classification.rho_0)
    if lifted is not None and torpedo_target(lifted, rho0) is not None:
        first = _blend_path(w, lifted, steps, p, q, margin, None, "case2-lift")
        second = retract_case1(lifted, rho0, steps, margin, n, p)
        path = first.concat(second)
        return _with_meta(path, case=2, eps=eps)
    path = _neck_path(w, rho0, steps, margin, p, q)
    return _with_meta(path, case=2, fallback="neck")


# ---------------------------------------------------------------- neck insertion (cases 3 and 4)


def _bsafe(W, W1, f0, f1, f2, P, q):
    s = BLEND_SAMPLES
    f = (1 - s) * f0 + s * W
    fp = (1 - s) * f1 + s * W1
    num = P + q * (q - 1) * (1 - fp * fp) / (f * f) - 2 * q * (1 - s) * f2 / f
    return float(np.min(num * f / (2 * q * s)))


class _Neck:
    """W on (0, r_J]: torpedo of radius delta', convex bend, line of slope s*, steepening."""

    def __init__(self, w, rJ, slope, drop, gain, P, q):
        self.w, self.rJ, self.slope, self.gain, self.P, self.q = w, rJ, slope, gain, P, q
        self.ok = False
        W0, W1, _ = w.evaluate_scalar(rJ)
        self.lA = 0.05 * rJ
        self.kappa = (slope - W1) / self.lA
        if abs(slope - W1) > 1e-9:
            stop = lambda r, y: y[1] - slope - np.copysign(1e-12, W1 - slope)  # noqa: E731
            stop.terminal = True
            self.solA = solve_ivp(self._rhs_a, (rJ, 0.0), [W0, W1], method="DOP853", events=stop,
                                  rtol=1e-11, atol=1e-14, dense_output=True)
            if self.solA.status != 1:
                return
            self.rA = float(self.solA.t[-1])
            yA = self.solA.y[0, -1]
        else:
            self.slope, self.kappa, self.rA, yA, self.solA = W1, 0.0, rJ, W0, None
        self.Wb = drop * W0
        if yA < self.Wb:
            return
        self.rB = self.rA - (yA - self.Wb) / self.slope
        if self.rB <= 0:
            return
        self.yA = yA
        self.lB = 0.1 * self.Wb
        stop = lambda r, y: y[1] - 1e-13  # noqa: E731
        stop.terminal = True
        floor = lambda r, y: y[0] - 1e-9 * self.Wb  # noqa: E731
        floor.terminal = True
        self.solB = solve_ivp(self._rhs_b, (self.rB, 1e-12), [self.Wb, self.slope], method="DOP853",
                              events=(stop, floor), rtol=1e-10, atol=1e-14, dense_output=True)
        if self.solB.status != 1 or len(self.solB.t_events[0]) == 0:
            return
        self.rn = float(self.solB.t[-1])
        self.delta = float(self.solB.y[0, -1])
        self.ok = self.rn - self.delta * np.pi / 2 >= 0.05 * self.delta

    def _w2a(self, r, W1):
        gate = np.sqrt(min(1.0, max((self.slope - W1) * np.sign(self.kappa), 0.0) / GATE))
        SA = step_scalar((self.rJ - r) / self.lA)
        return gate * ((1 - SA) * self.w.evaluate_scalar(r)[2] - SA * self.kappa)

    def _rhs_a(self, r, y):
        return [y[1], self._w2a(r, y[1])]

    def _w2b(self, r, W, W1):
        gate = np.sqrt(min(1.0, max(W1, 0.0) / GATE))
        SB = step_scalar((self.rB - r) / self.lB)
        if SB == 0.0 or gate == 0.0:
            return 0.0
        f0, f1, f2 = self.w.evaluate_scalar(r)
        return SB * self.gain * max(_bsafe(W, W1, f0, f1, f2, self.P, self.q), 0.0) * gate

    def _rhs_b(self, r, y):
        return [y[1], self._w2b(r, y[0], y[1])]

    def profile(self):
        d = self.delta
        blocks = [_torpedo_block(d, self.rn)]
        kb = np.linspace(self.rn, self.rB, 600)
        yb = self.solB.sol(kb)
        yb[:, 0] = (d, 0.0)
        blocks.append((kb, yb[0], yb[1], np.array([self._w2b(r, a, b) for r, a, b in zip(kb, yb[0], yb[1])])))
        kl = np.linspace(self.rB, self.rA, 40)
        blocks.append((kl, self.Wb + self.slope * (kl - self.rB), np.full(40, self.slope), np.zeros(40)))
        if self.solA is not None:
            ka = np.linspace(self.rA, self.rJ, 300)
            ya = self.solA.sol(ka)
            blocks.append((ka, ya[0], ya[1], np.array([self._w2a(r, b) for r, b in zip(ka, ya[1])])))
        w = self.w
        fj, d1j, d2j = w.evaluate(self.rJ)
        blocks.append((np.array([self.rJ]), np.array([fj]), np.array([d1j]), np.array([d2j])))
        return _splice(blocks, _tail(w, self.rJ), d, "necked")


def insert_neck(w, rho0, p=2, q=2):
    """Search the neck parameters; returns (W, record) or raises RetractFailed."""
    P = p * (p - 1)
    tried = 0
    for frac in NECK_EPS:
        rJ = rho0 * (1 - frac)
        if rJ <= 10 * w.r_series:
            continue
        w1 = w.evaluate_scalar(rJ)[1]
        slopes = [w1] + [s for s in NECK_SLOPES if s > w1 + 1e-9]
        for slope in slopes:
            for drop in NECK_DROP:
                for gain in NECK_GAINS:
                    tried += 1
                    neck = _Neck(w, rJ, slope, drop, gain, P, q)
                    if neck.ok:
                        record = {"r_J": rJ, "eps": rho0 - rJ, "slope": neck.slope, "drop": drop,
                                  "gain": gain, "delta": neck.delta, "r_neck": neck.rn}
                        return neck.profile(), record
    raise RetractFailed(f"no neck fits inside (0, {rho0:.6g}] ({tried} parameter sets tried)", "neck")


def _neck_path(w, rho0, steps, margin, p, q):
    W, record = insert_neck(w, rho0, p, q)
    path = _blend_path(w, W, steps, p, q, margin, None, "neck")
    return _with_meta(path, **record)


def retract_case3(w, classification, steps=64, margin=None, n=3, p=2):
    """Insert a torpedo neck just inside rho_0 through one certified linear blend."""
    return _with_meta(_neck_path(w, classification.rho_0, steps, margin, p, n - 1), case=3)


def retract_case4(w, classification, steps=64, margin=None, n=3, p=2):
    """Lift w'' to zero inside (0, rho_std], then proceed as in case 3."""
    q = n - 1
    rho = classification.rho_std
    center = rho - rho / 8
    lifted, eps, center = lift_second_derivative(w, center, rho / 8)
    if lifted is None:
        lifted, first = w, None
    else:
        first = _blend_path(w, lifted, steps, p, q, margin, None, "case4-lift")
    path = _neck_path(lifted, center, steps, margin, p, q)
    if first is not None:
        path = first.concat(path)
    return _with_meta(path, case=4, lift_center=center, lift_eps=eps)


def _with_meta(path, **extra):
    meta = dict(path.meta)
    meta.update(extra)
    return type(path)(path.s_grid, path.profiles, path.p, path.q, path.base_radii, path.certificates,
                      path.stages, meta)


# ---------------------------------------------------------------- dispatcher


def deformation_retract(w, rho_std, config=None):
    """Certified path from w to a warping function in torpedo form near the origin."""
    config = config or RetractConfig()
    p, q, n = config.p, config.q, config.q + 1
    if q < 2:
        from .errors import HypothesisError

        raise HypothesisError("q must be at least 2")
    found = is_torpedo_near_origin(w)
    if found is not None:
        path = constant_path(w, p, q, config.steps, config.margin, None, label="standard")
        return _with_meta(path, case=0, delta=found[0])
    cls = classify(w, rho_std, config.zero_tol)
    args = (config.steps, config.margin, n, p)
    if cls.case_id == 1:
        if torpedo_target(w, cls.rho_0) is None:
            path = _with_meta(_neck_path(w, cls.rho_0, *args[:2], p, q), fallback="neck")
        else:
            path = retract_case1(w, cls.rho_0, *args)
    elif cls.case_id == 2:
        path = retract_case2(w, cls, *args)
    elif cls.case_id == 3:
        path = retract_case3(w, cls, *args)
    else:
        path = retract_case4(w, cls, *args)
    end = is_torpedo_near_origin(path.end)
    if end is None:
        raise RetractFailed("endpoint is not in torpedo form", "endpoint", path.certificates[-1])
    return _with_meta(path, case=cls.case_id, classification=cls.to_dict(), delta=end[0], rho=end[1])


def default_retract_margin(q):
    return default_margin(q + 1)
