import numpy as np
import pytest

from envelope import geometry as geom


@pytest.fixture(scope="session")
def annulus():
    return geom.DomainSpec(geom.circle(0j, 2.0), (geom.circle(0j, 0.5),))


@pytest.fixture(scope="session")
def two_hole():
    return geom.DomainSpec(
        geom.circle(1.5 + 0j, 4.0),
        (geom.circle(0j, 0.5), geom.circle(3 + 0j, 0.5)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
