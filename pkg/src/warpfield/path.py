"""Discretized homotopies of warping functions with per-step certificates."""
import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import HomotopyFailed, UsageError
from .profile import curvature_certificate, profile_distance

SEAM_TOL = 1e-10


def thread_count():
    """Worker cap from WARPFIELD_THREADS (default 1, i.e. sequential)."""
    try:
        return max(1, int(os.environ.get("WARPFIELD_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fun, items):
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fun(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fun, items))


@dataclass(frozen=True)
class MetricPath:
    """Profiles g_s over an s-grid, each with the certificate of the total model curvature.

    ``base_radii`` holds the radius of the round S^p factor at each s; the total
    curvature is p(p-1)/radius^2 plus the fiber curvature in dimension q+1.
    """

    s_grid: np.ndarray
    profiles: tuple
    p: int
    q: int
    base_radii: np.ndarray
    certificates: tuple
    stages: tuple = ()
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.profiles)

    @property
    def passed(self):
        return all(c.passed for c in self.certificates)

    @property
    def R_min(self):
        return min(c.R_min for c in self.certificates)

    @property
    def start(self):
        return self.profiles[0]

    @property
    def end(self):
        return self.profiles[-1]

    def summary(self):
        worst = int(np.argmin([c.R_min for c in self.certificates]))
        return {
            "steps": len(self.profiles) - 1,
            "p": self.p,
            "q": self.q,
            "R_min": self.R_min,
            "worst_s": float(self.s_grid[worst]),
            "pass": self.passed,
            "stages": [list(s) for s in self.stages],
        }

    def is_constant(self, tol=1e-8):
        if np.ptp(self.base_radii) > tol:
            return False
        first = self.profiles[0]
        return all(profile_distance(first, g) <= tol for g in self.profiles[1:])

    def segment(self, name):
        for label, i, j in self.stages:
            if label == name:
                return self.profiles[i : j + 1]
        raise KeyError(name)

    def concat(self, other, tol=SEAM_TOL):
        """Join two paths end to start, rescaling both s-grids into [0, 1]."""
        if (self.p, self.q) != (other.p, other.q):
            raise UsageError("cannot join paths of different dimensions")
        gap = profile_distance(self.end, other.start)
        if gap > tol or abs(self.base_radii[-1] - other.base_radii[0]) > tol:
            raise HomotopyFailed(f"paths do not meet at the seam (gap {gap:.3g})")
        n0, n1 = len(self.profiles) - 1, len(other.profiles) - 1
        total = max(n0 + n1, 1)
        s = np.concatenate([self.s_grid * n0 / total, n0 / total + other.s_grid[1:] * n1 / total])
        stages = tuple(self.stages) + tuple((lab, i + n0, j + n0) for lab, i, j in other.stages)
        meta = {**self.meta, **{k: v for k, v in other.meta.items() if k not in self.meta}}
        return MetricPath(
            s,
            tuple(self.profiles) + tuple(other.profiles[1:]),
            self.p,
            self.q,
            np.concatenate([self.base_radii, other.base_radii[1:]]),
            tuple(self.certificates) + tuple(other.certificates[1:]),
            stages,
            meta,
        )

    def to_csv(self, path=None, stride=1):
        """Rows ``s,arc,f,R`` over every profile knot (every ``stride``-th knot)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "arc", "f", "R"])
        for s, g, c, rad in zip(self.s_grid, self.profiles, self.certificates, self.base_radii):
            k = g.knots[::stride]
            R = g.scalar_curvature(self.q + 1, k, offset=self.p * (self.p - 1) / rad**2)
            for a, f, r in zip(k, g.values[::stride], R):
                w.writerow([f"{s:.17g}", f"{a:.17g}", f"{f:.17g}", f"{r:.17g}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def family_certificate(self):
        return {
            "pass": self.passed,
            "R_min": self.R_min,
            "steps": [
                {"s": float(s), "R_min": c.R_min, "r_min_location": c.r_min_location, "pass": c.passed}
                for s, c in zip(self.s_grid, self.certificates)
            ],
            "summary": self.summary(),
        }


def certify_family(profiles, s_grid, p, q, base_radii=None, margin=None, delta=None, stages=(), meta=None):
    """Certify every profile; raise HomotopyFailed at the first failing s."""
    if base_radii is None:
        base_radii = np.ones(len(profiles))
    base_radii = np.asarray(base_radii, dtype=float)

    def cert(i):
        return curvature_certificate(
            profiles[i], q + 1, margin=margin, offset=p * (p - 1) / base_radii[i] ** 2, delta=delta
        )

    certs = parallel_map(cert, range(len(profiles)))
    for s, c in zip(s_grid, certs):
        if not c.passed:
            raise HomotopyFailed(
                f"certificate fails at s = {s:.6g} (R_min = {c.R_min:.6g} <= {c.margin:.3g})", float(s), c
            )
    return MetricPath(
        np.asarray(s_grid, dtype=float), tuple(profiles), p, q, base_radii, tuple(certs), tuple(stages), meta or {}
    )


def constant_path(profile, p, q, steps, margin=None, delta=None, base_radius=1.0, label="constant"):
    s = np.linspace(0.0, 1.0, steps + 1)
    return certify_family(
        [profile] * (steps + 1), s, p, q, np.full(steps + 1, base_radius), margin, delta, ((label, 0, steps),)
    )
