"""Isotopies of product model metrics ds_p^2 (scaled) + dr^2 + f(r)^2 ds_q^2.

The full isotopy is the bending homotopy followed by the fiber blend that
makes the cap an exact torpedo.  The model has no horizontal distribution,
so the flattening step of the general construction is the identity here.
"""
from dataclasses import dataclass

import numpy as np

from ._smooth import smooth_step, smooth_step_d1, smooth_step_d2
from .errors import FamilyFailed, HomotopyFailed, PreconditionError, UsageError, WarpfieldError
from .gl_bend import _check_dims, build_gl_curve, stage1_homotopy
from .path import certify_family, constant_path, parallel_map
from .profile import RadialProfile, curvature_certificate, linear_blend, profile_distance
from .torpedo import DEFAULT_WIDTH, TorpedoSpec, cap_function, is_torpedo_near_origin, torpedo_profile

DEFAULT_STEPS = 64
SAME_TOL = 1e-12


@dataclass(frozen=True)
class SubmersionModel:
    p: int
    q: int
    base_radius: float
    fiber: RadialProfile

    def __post_init__(self):
        if self.q < 2:
            from .errors import HypothesisError

            raise HypothesisError("the fiber sphere needs q >= 2")
        if not self.base_radius > 0:
            raise UsageError("base radius must be positive")

    @property
    def offset(self):
        return self.p * (self.p - 1) / self.base_radius**2


@dataclass(frozen=True)
class IsotopyConfig:
    delta: float = 0.05
    steps: int = DEFAULT_STEPS
    margin: float | None = None
    rho_bar: float | None = None


def _s_grid(steps):
    if steps < 1:
        raise UsageError("steps must be positive")
    return np.linspace(0.0, 1.0, steps + 1)


def fiber_homotopy(model, target, steps=DEFAULT_STEPS, margin=None):
    """Linear blend of the fiber to the torpedo of ``target``.

    The torpedo is laid out on the fiber's own domain, so ``target.b`` only
    needs to be compatible with it.
    """
    fiber = model.fiber
    spec = TorpedoSpec(target.delta, fiber.r_max, target.smoothing_width)
    tor = torpedo_profile(spec)
    s = _s_grid(steps)
    radii = np.full(len(s), model.base_radius)
    if profile_distance(fiber, tor) <= SAME_TOL:
        return constant_path(fiber, model.p, model.q, steps, margin, target.delta, model.base_radius, "fiber")
    profiles = [linear_blend(fiber, tor, float(x)) for x in s]
    return certify_family(profiles, s, model.p, model.q, radii, margin, target.delta, (("fiber", 0, steps),))


def base_homotopy(model, target_radius, steps=DEFAULT_STEPS, margin=None):
    """Linear path of the base sphere radius with the fiber held fixed."""
    if not target_radius > 0:
        raise UsageError("target radius must be positive")
    s = _s_grid(steps)
    radii = (1 - s) * model.base_radius + s * target_radius
    return certify_family(
        [model.fiber] * len(s), s, model.p, model.q, radii, margin, None, (("base", 0, steps),)
    )


def _neck_window(delta):
    return delta * np.pi / 2 + 0.25 * delta, 0.5 * delta


def standardize_cap(g, delta, smoothing_width=DEFAULT_WIDTH):
    """g with its cap replaced by the torpedo of radius delta, blended on the neck."""
    lo, width = _neck_window(delta)
    if lo + width > g.r_max:
        raise PreconditionError("profile ends before the neck window")
    k = g.knots
    x = (k - lo) / width
    chi, dchi, ddchi = smooth_step(x), smooth_step_d1(x) / width, smooth_step_d2(x) / width**2
    f, f1, f2 = g.values, g.d1, g.d2
    t, t1, t2 = cap_function(smoothing_width).evaluate(k / delta)
    t, t2 = delta * t, t2 / delta
    vals = (1 - chi) * t + chi * f
    d1 = (1 - chi) * t1 + chi * f1 + dchi * (f - t)
    d2 = (1 - chi) * t2 + chi * f2 + 2 * dchi * (f1 - t1) + ddchi * (f - t)
    jet = (-1 / (6 * delta**2), 0.0, 1 / (120 * delta**4))
    return RadialProfile(k, vals, d1, d2, True, jet, min(g.r_series, 1e-3 * delta), "standard")


def stage2_homotopy(g, p, q, delta, steps=DEFAULT_STEPS, margin=None):
    """Fiber blend from g to :func:`standardize_cap` of g (constant if already equal)."""
    target = standardize_cap(g, delta)
    if profile_distance(g, target) <= SAME_TOL:
        return constant_path(g, p, q, steps, margin, delta, label="fiber")
    s = _s_grid(steps)
    profiles = [linear_blend(g, target, float(x)) for x in s]
    return certify_family(profiles, s, p, q, None, margin, delta, (("fiber", 0, steps),))


def _require_positive(ambient, p, q, margin):
    cert = curvature_certificate(ambient, q + 1, margin=margin, offset=p * (p - 1))
    if not cert.passed:
        raise PreconditionError(f"input metric is not certified positive (R_min = {cert.R_min:.6g})")


def _isotopy_with_curve(ambient, p, q, config, curve):
    found = is_torpedo_near_origin(ambient)
    if found is not None:
        path = constant_path(ambient, p, q, config.steps, config.margin, found[0], label="graph")
        tail = constant_path(ambient, p, q, config.steps, config.margin, found[0], label="fiber")
        return path.concat(tail)
    path = stage1_homotopy(curve, ambient, p, q, config.steps, config.margin)
    tail = stage2_homotopy(path.end, p, q, config.delta, config.steps, config.margin)
    full = path.concat(tail)
    found = is_torpedo_near_origin(full.end)
    if found is None or abs(found[0] - config.delta) > 1e-6 * config.delta:
        raise HomotopyFailed("endpoint is not a torpedo of the configured radius", 1.0, full.certificates[-1])
    return full


def gromov_lawson_isotopy(ambient, p, q, config=None, curve=None):
    """Certified path from ``ambient`` to a metric that is a torpedo near the origin.

    An ambient that is already a torpedo near the origin gets the constant path.
    A prebuilt ``curve`` skips the curve search.
    """
    config = config or IsotopyConfig()
    _check_dims(p, q)
    _require_positive(ambient, p, q, config.margin)
    if is_torpedo_near_origin(ambient) is not None:
        return _isotopy_with_curve(ambient, p, q, config, None)
    if curve is None:
        curve, _ = build_gl_curve(ambient, p, q, config.delta, config.margin, config.rho_bar)
    return _isotopy_with_curve(ambient, p, q, config, curve)


@dataclass(frozen=True)
class FamilyIsotopy:
    """Paths for every family member and the measured continuity of the assignment."""

    paths: tuple
    input_distances: tuple
    output_distances: tuple

    @property
    def lipschitz(self):
        ratios = []
        for din, dout in zip(self.input_distances, self.output_distances):
            if din > 0:
                ratios.append(dout / din)
            elif dout > 0:
                ratios.append(float("inf"))
        return max(ratios, default=0.0)

    def __len__(self):
        return len(self.paths)

    def __getitem__(self, i):
        return self.paths[i]


def path_distance(a, b):
    """Largest sup-norm distance between corresponding members of two paths."""
    if len(a) != len(b):
        return float("inf")
    return max(profile_distance(x, y) for x, y in zip(a.profiles, b.profiles))


def family_isotopy(family, p, q, config=None, curve=None):
    """Isotopy of every member with one shared curve.

    Unless given, the curve is built on the first non-standard member.
    """
    config = config or IsotopyConfig()
    _check_dims(p, q)
    family = list(family)
    if not family:
        raise UsageError("empty family")
    for i, g in enumerate(family):
        try:
            _require_positive(g, p, q, config.margin)
        except PreconditionError as exc:
            raise FamilyFailed(str(exc), i) from None
    for i, g in enumerate(family):
        if curve is None and is_torpedo_near_origin(g) is None:
            try:
                curve, _ = build_gl_curve(g, p, q, config.delta, config.margin, config.rho_bar)
            except WarpfieldError as exc:
                raise FamilyFailed(f"member {i}: {exc}", i, getattr(exc, "certificate", None)) from None
            break

    def run(i):
        try:
            return _isotopy_with_curve(family[i], p, q, config, curve)
        except WarpfieldError as exc:
            return exc

    results = parallel_map(run, range(len(family)))
    for i, res in enumerate(results):
        if isinstance(res, Exception):
            raise FamilyFailed(f"member {i}: {res}", i, getattr(res, "certificate", None))
    din = tuple(profile_distance(a, b) for a, b in zip(family, family[1:]))
    dout = tuple(path_distance(a, b) for a, b in zip(results, results[1:]))
    return FamilyIsotopy(tuple(results), din, dout)
