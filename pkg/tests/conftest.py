import numpy as np
import pytest

from warpfield.gl_bend import build_gl_curve, stage1_homotopy
from warpfield.profile import flat_profile


class FlatBend:
    """Flat ambient on [0, 1], p = q = 2, delta = 0.05: curve and stage-one path."""

    def __init__(self):
        self.ambient = flat_profile(1.0)
        self.curve, self.cert = build_gl_curve(self.ambient, 2, 2, 0.05)
        self.path = stage1_homotopy(self.curve, self.ambient, 2, 2, 64)


@pytest.fixture(scope="session")
def flat_bend():
    return FlatBend()


@pytest.fixture(scope="session")
def flat_isotopy(flat_bend):
    from warpfield.isotopy import IsotopyConfig, gromov_lawson_isotopy

    return gromov_lawson_isotopy(flat_bend.ambient, 2, 2, IsotopyConfig(delta=0.05), curve=flat_bend.curve)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
