"""Seeded property suites shared by ``warpfield verify`` and the test-suite."""
import time
from dataclasses import dataclass

import numpy as np

from .errors import WarpfieldError
from .gl_bend import build_gl_curve, graph_curvature_profile, induced_profile, stage1_homotopy
from .isotopy import IsotopyConfig, family_isotopy, gromov_lawson_isotopy
from .profile import (
    curvature_certificate,
    cubic_profile,
    finite_diff_check,
    flat_profile,
    profile_distance,
    sine_profile,
)
from .retract import RetractConfig, deformation_retract
from .surgery import Exterior, StdMetricDescriptor, handle_curvature_certificate, surgery_j, surgery_j_inv
from .torpedo import (
    TorpedoSpec,
    base_function_f1,
    is_torpedo_near_origin,
    torpedo_like_profile,
    torpedo_profile,
)

FD_TOL = 1e-5
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    failures: int
    seconds: float
    detail: str = ""

    @property
    def passed(self):
        return self.failures == 0


# ---------------------------------------------------------------- generators


def random_admissible(rng):
    """(w, rho_std, expected case) drawn from torpedo, fattened-neck and hemisphere shapes.

    Case 0 marks inputs that are already standard.
    """
    kind = int(rng.integers(3))
    if kind == 0:
        delta = rng.uniform(0.05, 0.3)
        b = rng.uniform(1.2, 3.0) * delta * np.pi / 2
        return torpedo_profile(TorpedoSpec(delta, b)), b, 0
    if kind == 1:
        delta = rng.uniform(0.05, 0.3)
        end = np.pi / 2 + rng.uniform(0.3, 0.6)
        b = rng.uniform(1.0, 2.0) * delta * end
        return torpedo_like_profile(delta, b, 1.05, end, np.pi / 4), b, 1
    delta = rng.uniform(0.05, 0.4)
    rho = delta * np.pi / 2
    return sine_profile(delta, rho), rho, 2


def retraction_examples():
    """(name, w, rho_std) for the shapes a warping function may take."""
    return [
        ("torpedo", torpedo_profile(TorpedoSpec(0.2, 1.0)), 1.0),
        ("fattened neck", torpedo_like_profile(0.2, 1.0, 1.05, np.pi / 2 + 0.45, np.pi / 4), 1.0),
        ("hemisphere", sine_profile(0.2, 0.1 * np.pi), 0.1 * np.pi),
        ("quintic", cubic_profile(-0.1, 2.0, 0.01), 2.0),
        ("sine", sine_profile(1.0, 1.0), 1.0),
    ]


def random_descriptor(rng):
    p, q = int(rng.integers(2, 7)), int(rng.integers(2, 7))
    rho_bar = float(rng.uniform(0.5, 2.0))
    cap = rho_bar / (np.pi / 2)
    delta, delta_h = (float(rng.uniform(0.01, 1.0) * cap) for _ in range(2))
    rho = float(rng.uniform(delta * np.pi / 2, rho_bar))
    handle_rho = float(rng.uniform(delta_h * np.pi / 2, rho_bar))
    side = "X" if rng.random() < 0.5 else "Y"
    tag = "".join(rng.choice(list("abcdef0123456789"), 12))
    return StdMetricDescriptor(side, p, q, rho_bar, rho, delta, delta_h, handle_rho, Exterior(tag, f"{tag}.csv"))


def flat_family(size=5, r_max=1.0, amplitude=1e-3):
    """r - a r^3 for a evenly spaced in [0, amplitude]; sup-distance to flat is at most amplitude."""
    return [cubic_profile(-amplitude * i / (size - 1), r_max) for i in range(size)]


# ---------------------------------------------------------------- suites


def suite_oracles(rng):
    """Closed-form curvature of r, delta*sin(r/delta) and the constant delta (a torpedo neck)."""
    worst, cases, fails = 0.0, 0, 0
    for n in (3, 4, 5, 6):
        for delta in (0.05, 0.1, 0.5):
            sphere = sine_profile(delta, delta * np.pi / 2 * 0.999)
            R = sphere.scalar_curvature(n, sphere.knots)
            err = np.max(np.abs(R / (n * (n - 1) / delta**2) - 1))
            tor = torpedo_profile(TorpedoSpec(delta, 4 * delta))
            neck = tor.knots[tor.knots >= delta * np.pi / 2]
            Rc = tor.scalar_curvature(n, neck)
            err = max(err, np.max(np.abs(Rc / ((n - 1) * (n - 2) / delta**2) - 1)))
            flat = flat_profile(1.0)
            err_flat = np.max(np.abs(flat.scalar_curvature(n, flat.knots)))
            cases += 3
            fails += int(err > ORACLE_TOL) + int(err_flat > ORACLE_TOL)
            worst = max(worst, err, err_flat)
    return cases, fails, f"max rel err {worst:.2e}"


def suite_torpedo(rng):
    cases = fails = 0
    scaled = []
    for delta in (0.05, 0.1, 0.2, 0.5):
        t = torpedo_profile(TorpedoSpec(delta, 5 * delta))
        scaled.append(curvature_certificate(t, 3, margin=0.0).R_min * delta**2)
        cases += 1
        fails += int(not curvature_certificate(t, 3).passed)
    spread = (max(scaled) - min(scaled)) / min(scaled)
    cases += 1
    fails += int(spread > 1e-6)
    f1 = base_function_f1()
    k = f1.knots[(f1.knots > 0) & (f1.knots <= np.pi / 2 - 1e-3)]
    _, d1, d2 = f1.evaluate(k)
    cases += 2
    fails += int(np.any(d2 >= 0)) + int(np.any(d1 <= 0))
    big = curvature_certificate(torpedo_profile(TorpedoSpec(0.1, 0.5)), 3, margin=0.0).R_min
    cases += 1
    fails += int(big < 100)
    return cases, fails, f"R_min*delta^2 spread {spread:.1e}, R_min(0.1) {big:.1f}"


def shipped_profiles():
    """One instance of every public profile constructor."""
    return [
        ("flat", flat_profile(1.0), 1.0),
        ("sine", sine_profile(0.2, 0.3), 0.2),
        ("cubic", cubic_profile(-0.1, 0.8), 1.0),
        ("torpedo", torpedo_profile(TorpedoSpec(0.1, 0.5)), 0.1),
        ("f1", base_function_f1(), 1.0),
        ("torpedo-like", torpedo_like_profile(0.2, 1.0, 1.05, np.pi / 2 + 0.45, np.pi / 4), 0.2),
    ]


def suite_finite_differences(rng):
    worst, cases, fails = 0.0, 0, 0
    for _, prof, scale in shipped_profiles():
        h = 1e-4 * scale
        for r in rng.uniform(2 * h, prof.r_max - 2 * h, 20):
            err = finite_diff_check(prof, float(r), h) * scale
            worst = max(worst, err)
            cases += 1
            fails += int(err >= FD_TOL)
    return cases, fails, f"max scaled discrepancy {worst:.2e}"


def suite_surgery(rng, samples=1000):
    fails = 0
    for _ in range(samples):
        d = random_descriptor(rng)
        try:
            if d.side == "X":
                ok = surgery_j_inv(surgery_j(d)) == d
            else:
                ok = surgery_j(surgery_j_inv(d)) == d
            ok = ok and StdMetricDescriptor.from_json(d.to_json()) == d
        except WarpfieldError:
            ok = False
        fails += int(not ok)
    cases = samples
    for p in (2, 3, 4):
        for q in (2, 3, 4):
            for delta in (0.05, 0.1, 0.5):
                cases += 1
                fails += int(not handle_curvature_certificate(p, q, delta).passed)
    return cases, fails, f"{samples} round trips"


def suite_retract(rng, samples=500, steps=8):
    fails, worst = 0, np.inf
    config = RetractConfig(steps=steps)
    for _ in range(samples):
        w, rho, expect = random_admissible(rng)
        try:
            path = deformation_retract(w, rho, config)
            ok = path.passed and path.meta["case"] == expect and is_torpedo_near_origin(path.end) is not None
            if expect == 0:
                ok = ok and path.is_constant(1e-8)
            worst = min(worst, path.R_min)
        except WarpfieldError:
            ok = False
        fails += int(not ok)
    return samples, fails, f"min R over all paths {worst:.3g}"


class _Flat:
    """The flat ambient, its curve and stage-one path, built once per run."""

    def __init__(self):
        self.ambient = flat_profile(1.0)
        self.curve, _ = build_gl_curve(self.ambient, 2, 2, 0.05)
        self.path = stage1_homotopy(self.curve, self.ambient, 2, 2, 64)


def suite_bend(rng, flat=None):
    flat = flat or _Flat()
    path = flat.path
    checks = [
        path.passed and len(path.profiles) == 65,
        profile_distance(path.start, flat.ambient) < 1e-10,
        profile_distance(path.end, induced_profile(flat.curve, flat.ambient)) < 1e-10,
        bool(np.all(np.diff(graph_curvature_profile(flat.curve, 64)[1]) >= 0)),
    ]
    return len(checks), checks.count(False), f"R_min {path.R_min:.4g}"


def suite_isotopy(rng, flat=None):
    flat = flat or _Flat()
    config = IsotopyConfig(delta=0.05)
    path = gromov_lawson_isotopy(flat.ambient, 2, 2, config, curve=flat.curve)
    found = is_torpedo_near_origin(path.end)
    again = gromov_lawson_isotopy(path.end, 2, 2, config)
    fam = family_isotopy(flat_family(), 2, 2, config, curve=flat.curve)
    checks = [
        path.passed,
        found is not None and abs(found[0] - 0.05) <= 1e-6 * 0.05,
        again.is_constant(1e-8),
        all(is_torpedo_near_origin(p.end) is not None for p in fam.paths),
        bool(np.isfinite(fam.lipschitz)),
    ]
    return len(checks), checks.count(False), f"family L {fam.lipschitz:.3g}"


SUITES = {
    "curvature-oracles": suite_oracles,
    "torpedo-family": suite_torpedo,
    "finite-differences": suite_finite_differences,
    "surgery-bijection": suite_surgery,
    "retract-random": suite_retract,
    "bend-homotopy": suite_bend,
    "isotopy": suite_isotopy,
}


def run_suites(seed=0, names=None):
    rng = np.random.default_rng(seed)
    names = list(SUITES) if names is None else list(names)
    flat = _Flat() if {"bend-homotopy", "isotopy"} & set(names) else None
    results = []
    for name in names:
        fun = SUITES[name]
        t0 = time.perf_counter()
        kwargs = {"flat": flat} if name in ("bend-homotopy", "isotopy") else {}
        try:
            cases, fails, detail = fun(rng, **kwargs)
        except WarpfieldError as exc:
            cases, fails, detail = 1, 1, f"error: {exc}"
        results.append(SuiteResult(name, cases, fails, time.perf_counter() - t0, detail))
    return results


def format_table(results, timings=False):
    head = f"{'suite':<20} {'cases':>6} {'fail':>5}  {'status':<6} detail"
    lines = [head, "-" * len(head)]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        extra = f" ({r.seconds:.1f}s)" if timings else ""
        lines.append(f"{r.name:<20} {r.cases:>6} {r.failures:>5}  {status:<6} {r.detail}{extra}")
    return "\n".join(lines)
