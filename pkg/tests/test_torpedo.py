import numpy as np
import pytest

from warpfield.errors import DomainError
from warpfield.profile import curvature_certificate, flat_profile, sine_profile
from warpfield.torpedo import (
    TorpedoSpec,
    base_function_f1,
    cap_function,
    is_torpedo_near_origin,
    torpedo_like_profile,
    torpedo_min_curvature,
    torpedo_profile,
)


def test_f1_is_sine_then_constant():
    f1 = base_function_f1()
    assert f1(0.1) == pytest.approx(np.sin(0.1), abs=1e-14)
    assert f1(2.0) == pytest.approx(1.0, abs=1e-14)
    assert f1.evaluate(2.5)[1] == pytest.approx(0.0, abs=1e-14)


def test_f1_concave_and_increasing_before_plateau():
    f1 = base_function_f1()
    k = f1.knots[(f1.knots > 0) & (f1.knots <= np.pi / 2 - 1e-3)]
    _, d1, d2 = f1.evaluate(k)
    assert np.all(d2 < 0) and np.all(d1 > 0)


def test_f1_odd_at_origin():
    assert base_function_f1().odd_extension_defect() < 1e-12


def test_cap_function_clamps_to_plateau():
    cap = cap_function()
    f, d1, d2 = cap.evaluate(np.array([3.0, 10.0]))
    assert np.allclose(f, 1.0) and np.allclose(d1, 0.0) and np.allclose(d2, 0.0)


def test_torpedo_neck_value():
    t = torpedo_profile(TorpedoSpec(0.5, 1.5))
    assert t(1.2) == pytest.approx(0.5, abs=1e-14)


def test_infinitesimal_variant():
    spec = TorpedoSpec(0.2, 0.2 * np.pi / 2)
    assert spec.infinitesimal
    t = torpedo_profile(spec)
    assert t.r_max == pytest.approx(0.1 * np.pi)
    assert t.d1[-1] == pytest.approx(0.0, abs=1e-12)
    assert not TorpedoSpec(0.2, 1.0).infinitesimal


def test_spec_validation():
    with pytest.raises(DomainError):
        TorpedoSpec(0.0, 1.0)
    with pytest.raises(DomainError):
        TorpedoSpec(0.2, 0.1)
    with pytest.raises(DomainError):
        TorpedoSpec(0.2, 1.0, smoothing_width=1.0)


@pytest.mark.parametrize("delta", [0.05, 0.2, 1.0])
def test_scaling_covariance(delta):
    unit = torpedo_profile(TorpedoSpec(1.0, 3.0))
    scaled = torpedo_profile(TorpedoSpec(delta, 3.0 * delta))
    assert np.allclose(scaled.knots / delta, unit.knots, rtol=1e-12)
    assert np.allclose(scaled.values / delta, unit.values, rtol=1e-12, atol=1e-15)


def test_min_curvature_scales_like_inverse_square():
    vals = [torpedo_min_curvature(TorpedoSpec(d, 5 * d), 3) * d**2 for d in (0.05, 0.1, 0.2, 0.5)]
    assert (max(vals) - min(vals)) / min(vals) < 1e-6


def test_large_curvature_for_small_delta():
    cert = curvature_certificate(torpedo_profile(TorpedoSpec(0.1, 0.5)), 3, margin=0.0)
    assert cert.R_min >= 100


@pytest.mark.parametrize("delta,b", [(0.3, 1.0), (0.1, 0.5), (0.05, 0.05 * np.pi / 2)])
def test_recognizes_its_own_torpedoes(delta, b):
    found = is_torpedo_near_origin(torpedo_profile(TorpedoSpec(delta, b)))
    assert found is not None
    assert found[0] == pytest.approx(delta, rel=1e-9)
    assert found[1] == pytest.approx(b, rel=1e-12)


def test_rejects_other_shapes():
    assert is_torpedo_near_origin(flat_profile(1.0)) is None
    assert is_torpedo_near_origin(sine_profile(0.2, 0.25)) is None
    fat = torpedo_like_profile(0.2, 1.0, 1.05, np.pi / 2 + 0.45, np.pi / 4)
    assert is_torpedo_near_origin(fat) is None


def test_torpedo_like_needs_room():
    with pytest.raises(DomainError):
        torpedo_like_profile(0.2, 0.3, 1.05, np.pi / 2 + 0.45, np.pi / 4)


def test_detection_radius_with_exterior_bump():
    from warpfield._smooth import bump
    from warpfield.profile import RadialProfile

    t = torpedo_profile(TorpedoSpec(0.2, 1.0))
    k = t.knots
    x = (k - 0.6) / 0.2
    b = bump(x)
    inside = np.abs(x) < 1
    g = np.zeros_like(x)
    h = np.zeros_like(x)
    g[inside] = -2 * x[inside] / (1 - x[inside] ** 2) ** 2
    h[inside] = -2 * (1 + 3 * x[inside] ** 2) / (1 - x[inside] ** 2) ** 3
    a = 1e-2
    bumped = RadialProfile(k, t.values + a * b, t.d1 + a * b * g / 0.2, t.d2 + a * b * (g * g + h) / 0.04,
                           True, t.taylor, t.r_series)
    found = is_torpedo_near_origin(bumped)
    assert found is not None
    assert found[0] == pytest.approx(0.2, rel=1e-9)
    assert found[1] == pytest.approx(0.4, abs=0.02)
