import numpy as np
import pytest

from tensurf import zoo


@pytest.fixture(scope="session")
def sphere():
    return zoo.make_sphere(1.0).surface


@pytest.fixture(scope="session")
def torus():
    return zoo.make_torus(2.0, 0.5).surface


@pytest.fixture(scope="session")
def ellipsoid():
    return zoo.make_ellipsoid(1.0, 1.3, 0.7).surface


@pytest.fixture(scope="session")
def hypersphere():
    return zoo.make_hypersphere3(1.0).surface


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def interior_points(surface, count, rng, margin=0.05):
    lo = np.asarray(surface.lower, dtype=float)
    hi = np.asarray(surface.upper, dtype=float)
    span = hi - lo
    pad = np.where(surface.periodic, 0.0, margin * span)
    return lo + pad + (span - 2 * pad) * rng.random((count, len(lo)))
