import numpy as np
import pytest

from warpfield.errors import ConstructionFailed, HypothesisError, PreconditionError, UsageError
from warpfield.gl_bend import (
    arc_length_param,
    build_gl_curve,
    curve_rows,
    graph_curvature_profile,
    homotopy_radii,
    induced_profile,
    quarter_circle_curve,
    stage1_homotopy,
    total_model_curvature,
    vertical_curve,
)
from warpfield.profile import flat_profile, profile_distance
from warpfield.torpedo import is_torpedo_near_origin

# Values frozen from the reference build: flat ambient, p = q = 2, delta = 0.05, rho_bar = 1.
FROZEN_THETA = 0.46838
FROZEN_R_MIN = 0.20589


def test_vertical_curve_gives_ambient():
    amb = flat_profile(1.0)
    g = induced_profile(vertical_curve(0.7), amb)
    assert g.r_max == pytest.approx(0.7)
    assert np.allclose(g.values, g.knots, atol=1e-15)


def test_quarter_circle_gives_round_cap():
    amb = flat_profile(1.0)
    g = induced_profile(quarter_circle_curve(0.2), amb)
    assert g.r_max == pytest.approx(0.1 * np.pi)
    assert np.max(np.abs(g.values - 0.2 * np.sin(g.knots / 0.2))) < 1e-12


def test_quarter_circle_curvature_oracle():
    cert = total_model_curvature(quarter_circle_curve(0.2), flat_profile(1.0), 0, 3, margin=0.0)
    assert cert.R_min == pytest.approx(300.0, rel=1e-6)


def test_fiber_sphere_must_be_two_dimensional():
    with pytest.raises(HypothesisError):
        total_model_curvature(quarter_circle_curve(0.2), flat_profile(1.0), 2, 1)
    with pytest.raises(HypothesisError):
        build_gl_curve(flat_profile(1.0), 2, 1, 0.05)


def test_build_preconditions():
    with pytest.raises(PreconditionError):
        build_gl_curve(flat_profile(1.0), 2, 2, 0.5)
    with pytest.raises(PreconditionError):
        build_gl_curve(flat_profile(1.0), 2, 2, 0.05, rho_bar=2.0)


def test_frozen_build(flat_bend):
    c, cert = flat_bend.curve, flat_bend.cert
    assert c.tilt_angle == pytest.approx(FROZEN_THETA, abs=5e-5)
    assert cert.passed
    assert cert.R_min == pytest.approx(FROZEN_R_MIN, abs=5e-5)
    assert c.contact_radius == 0.05
    assert c.rho_bar == 1.0


def test_curve_ends_in_torpedo(flat_bend):
    g = induced_profile(flat_bend.curve, flat_bend.ambient)
    found = is_torpedo_near_origin(g)
    assert found is not None and found[0] == pytest.approx(0.05, rel=1e-6)


def test_arc_length_sampling(flat_bend):
    ell, t, r, v, _ = arc_length_param(flat_bend.curve, 256)
    assert r[0] == pytest.approx(0.0, abs=1e-12) and r[-1] == pytest.approx(1.0)
    assert t[-1] == 0.0 and np.all(np.diff(t) <= 1e-15)
    assert np.all(np.diff(r) >= -1e-15)
    with pytest.raises(UsageError):
        arc_length_param(flat_bend.curve, 10)


def test_curve_rows_name_segments(flat_bend):
    names = {row[0] for row in curve_rows(flat_bend.curve, 128)}
    assert names <= {label for label, _, _ in flat_bend.curve.segments}
    assert len(names) >= 3


def test_stage1_path(flat_bend):
    path = flat_bend.path
    assert len(path.profiles) == 65 and path.passed and path.R_min > 0
    assert profile_distance(path.start, flat_bend.ambient) < 1e-10
    assert profile_distance(path.end, induced_profile(flat_bend.curve, flat_bend.ambient)) < 1e-10


def test_graph_second_derivative_grows_monotonically(flat_bend):
    s, peak = graph_curvature_profile(flat_bend.curve, 64)
    assert peak[0] == 0.0
    assert np.all(np.diff(peak) >= 0)


def test_radii_shrink_along_homotopy(flat_bend):
    ell = np.linspace(0.05, 0.9, 12)
    rows = homotopy_radii(flat_bend.curve, ell, 64)
    assert np.all(np.diff(rows, axis=0) <= 1e-12)


def test_stage1_step_floor(flat_bend):
    with pytest.raises(UsageError):
        stage1_homotopy(flat_bend.curve, flat_bend.ambient, 2, 2, 8)


def test_vertical_stage1_is_constant():
    amb = flat_profile(1.0)
    path = stage1_homotopy(vertical_curve(1.0), amb, 2, 2, 16)
    assert path.is_constant()


@pytest.mark.slow
def test_unreachable_margin_fails():
    with pytest.raises(ConstructionFailed) as info:
        build_gl_curve(flat_profile(1.0), 2, 2, 0.05, margin=1e9)
    assert info.value.certificate is not None
    assert info.value.certificate.R_min < 1e9
