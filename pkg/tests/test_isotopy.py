import numpy as np
import pytest

from warpfield.errors import FamilyFailed, HypothesisError, PreconditionError, UsageError
from warpfield.isotopy import (
    IsotopyConfig,
    SubmersionModel,
    base_homotopy,
    family_isotopy,
    fiber_homotopy,
    gromov_lawson_isotopy,
    path_distance,
    stage2_homotopy,
    standardize_cap,
)
from warpfield.profile import cubic_profile, flat_profile, profile_distance, sine_profile
from warpfield.torpedo import TorpedoSpec, is_torpedo_near_origin, torpedo_profile
from warpfield.verify import flat_family


def test_fiber_homotopy_reaches_torpedo():
    model = SubmersionModel(2, 2, 1.0, sine_profile(0.2, 0.45))
    path = fiber_homotopy(model, TorpedoSpec(0.2, 0.45), steps=16)
    assert path.passed and len(path) == 17
    assert profile_distance(path.start, model.fiber) == 0.0
    assert is_torpedo_near_origin(path.end) is not None


def test_fiber_homotopy_constant_on_torpedo():
    tor = torpedo_profile(TorpedoSpec(0.2, 1.0))
    path = fiber_homotopy(SubmersionModel(2, 2, 1.0, tor), TorpedoSpec(0.2, 1.0), steps=8)
    assert path.is_constant()


def test_base_homotopy_moves_only_the_radius():
    model = SubmersionModel(3, 2, 1.0, torpedo_profile(TorpedoSpec(0.2, 1.0)))
    path = base_homotopy(model, 0.5, steps=10)
    assert path.base_radii[0] == 1.0 and path.base_radii[-1] == 0.5
    assert all(g is model.fiber for g in path.profiles)
    assert path.certificates[-1].R_min > path.certificates[0].R_min
    with pytest.raises(UsageError):
        base_homotopy(model, 0.0)


def test_model_validation():
    with pytest.raises(HypothesisError):
        SubmersionModel(2, 1, 1.0, flat_profile(1.0))
    with pytest.raises(UsageError):
        SubmersionModel(2, 2, 0.0, flat_profile(1.0))


def test_standardize_cap_is_idempotent():
    tor = torpedo_profile(TorpedoSpec(0.05, 1.0))
    assert profile_distance(standardize_cap(tor, 0.05), tor) < 1e-12
    assert stage2_homotopy(tor, 2, 2, 0.05, steps=8).is_constant()


def test_flat_isotopy(flat_isotopy):
    path = flat_isotopy
    assert path.passed and path.R_min > 0
    found = is_torpedo_near_origin(path.end)
    assert found is not None and found[0] == pytest.approx(0.05, rel=1e-6)
    labels = [s[0] for s in path.stages]
    assert labels == ["graph", "untilt", "fiber"]
    assert profile_distance(path.start, flat_profile(1.0)) < 1e-10


def test_seams_are_exact(flat_isotopy):
    path = flat_isotopy
    for (_, _, j), (_, i, _) in zip(path.stages, path.stages[1:]):
        assert i == j
    assert np.all(np.diff(path.s_grid) > 0)
    assert path.s_grid[0] == 0.0 and path.s_grid[-1] == 1.0


def test_rerun_on_endpoint_is_constant(flat_isotopy):
    again = gromov_lawson_isotopy(flat_isotopy.end, 2, 2, IsotopyConfig(delta=0.05, steps=16))
    assert again.is_constant(1e-8)
    assert [s[0] for s in again.stages] == ["graph", "fiber"]


def test_rejects_non_positive_input():
    with pytest.raises(PreconditionError):
        gromov_lawson_isotopy(cubic_profile(0.3, 1.0), 2, 2)


def test_family(flat_bend):
    fam = family_isotopy(flat_family(), 2, 2, IsotopyConfig(delta=0.05), curve=flat_bend.curve)
    assert len(fam) == 5
    assert all(p.passed and is_torpedo_near_origin(p.end) is not None for p in fam.paths)
    assert all(d <= 1e-3 for d in fam.input_distances)
    assert np.isfinite(fam.lipschitz)
    assert path_distance(fam[0], fam[0]) == 0.0


def test_family_reports_failing_member():
    bad = [flat_profile(1.0), cubic_profile(0.3, 1.0)]
    with pytest.raises(FamilyFailed) as info:
        family_isotopy(bad, 2, 2)
    assert info.value.index == 1
    with pytest.raises(UsageError):
        family_isotopy([], 2, 2)
