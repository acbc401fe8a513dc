"""Descriptor-level surgery correspondence between standard metrics on X and Y.

A standard metric is described by its tube data near the surgery sphere and an
opaque exterior.  Surgery on S^p with normal disk D^{q+1} produces Y, where the
attached handle D^{p+1} x S^q carries a torpedo of radius delta_h times a round
S^q of radius delta.  Seen from Y the roles of p and q swap: the new surgery
sphere is the S^q, and its normal disk carries the handle torpedo.

``handle_rho`` stores the standardness radius the handle has on the other side.
Because every field has a partner, j and its inverse are plain field swaps and
compose to the identity exactly.
"""
import json
import math
from dataclasses import asdict, dataclass, field, replace

from .errors import DomainError, HypothesisError, UsageError
from .profile import curvature_certificate, default_margin
from .torpedo import TorpedoSpec, torpedo_profile

SIDES = ("X", "Y")


@dataclass(frozen=True)
class Exterior:
    """Opaque stand-in for the metric away from the tube."""

    tag: str
    collar_profile_csv: str = ""


@dataclass(frozen=True)
class StdMetricDescriptor:
    side: str
    p: int
    q: int
    rho_bar: float
    rho: float
    delta: float
    delta_h: float | None = None
    handle_rho: float | None = None
    exterior: Exterior = field(default_factory=lambda: Exterior(""))

    def __post_init__(self):
        if self.side not in SIDES:
            raise UsageError(f"side must be one of {SIDES}, got {self.side!r}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise UsageError(f"{name} must be a non-negative integer")
        if self.q < 2:
            raise HypothesisError("the normal sphere needs q >= 2")
        if self.delta_h is None:
            object.__setattr__(self, "delta_h", self.delta)
        if self.handle_rho is None:
            object.__setattr__(self, "handle_rho", self.delta_h * math.pi / 2)
        if isinstance(self.exterior, dict):
            object.__setattr__(self, "exterior", Exterior(**self.exterior))
        for name in ("rho_bar", "rho", "delta", "delta_h", "handle_rho"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number")
        if self.rho > self.rho_bar or self.handle_rho > self.rho_bar:
            raise DomainError("standardness radii cannot exceed rho_bar")
        slack = 1 - 1e-12
        if self.rho < self.delta * math.pi / 2 * slack:
            raise DomainError("rho is smaller than the torpedo cap delta*pi/2")
        if self.handle_rho < self.delta_h * math.pi / 2 * slack:
            raise DomainError("handle_rho is smaller than the handle cap delta_h*pi/2")

    def to_dict(self):
        return asdict(self)

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        missing = {"side", "p", "q", "rho_bar", "rho", "delta"} - set(data)
        if missing:
            raise UsageError(f"descriptor lacks fields: {sorted(missing)}")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown descriptor fields: {sorted(extra)}")
        ext = data.get("exterior") or {}
        if not isinstance(ext, dict) or "tag" not in ext:
            raise UsageError("exterior must be an object with a 'tag'")
        data["exterior"] = Exterior(str(ext["tag"]), str(ext.get("collar_profile_csv", "")))
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"descriptor is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("descriptor JSON must be an object")
        return cls.from_dict(data)


def _swap(d, side):
    return replace(
        d,
        side=side,
        p=d.q,
        q=d.p,
        rho=d.handle_rho,
        handle_rho=d.rho,
        delta=d.delta_h,
        delta_h=d.delta,
    )


def _check_invertible(d):
    if d.p < 2:
        raise HypothesisError("surgery on S^p is only invertible here for p >= 2")


def surgery_j(d):
    """X-side descriptor to the Y-side descriptor of the surgered manifold."""
    if d.side != "X":
        raise UsageError("surgery_j expects an X-side descriptor")
    _check_invertible(d)
    return _swap(d, "Y")


def surgery_j_inv(d):
    """Y-side descriptor back to the X side (the complementary surgery)."""
    if d.side != "Y":
        raise UsageError("surgery_j_inv expects a Y-side descriptor")
    _check_invertible(d)
    return _swap(d, "X")


def handle_curvature_certificate(p, q, delta, delta_h=None, margin=None, points=None):
    """Certificate for R = R_tor(delta_h, dim p+1) + q(q-1)/delta^2 over the handle.

    The torpedo is the smallest one, ending at delta_h*pi/2.
    """
    if q < 2:
        raise HypothesisError("the handle sphere needs q >= 2")
    if p < 1:
        raise HypothesisError("the handle disk needs p >= 1")
    if not delta > 0:
        raise DomainError("delta must be positive")
    delta_h = delta if delta_h is None else delta_h
    prof = torpedo_profile(TorpedoSpec(delta_h, delta_h * math.pi / 2), points)
    offset = q * (q - 1) / delta**2
    if margin is None:
        margin = default_margin(p + 1)
    return curvature_certificate(prof, p + 1, margin=margin, offset=offset)
