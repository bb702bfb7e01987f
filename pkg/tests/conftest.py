"""Shared fixtures: domains and orthonormal systems are expensive, build once."""

import pytest

from bergman_lab import geometry as geo
from bergman_lab import moments as mo


@pytest.fixture(scope="session")
def disk():
    return geo.domain_from_spec("disk")


@pytest.fixture(scope="session")
def square():
    return geo.domain_from_spec("ngon:N=4")


@pytest.fixture(scope="session")
def lens():
    return geo.domain_from_spec("lens")


@pytest.fixture(scope="session")
def ellipse():
    return geo.domain_from_spec("ellipse:rho=1.5")


@pytest.fixture(scope="session")
def disk_system(disk):
    return mo.orthonormalize(mo.gram(disk, 16))


@pytest.fixture(scope="session")
def square_system(square):
    return mo.orthonormalize(mo.gram(square, 16))
