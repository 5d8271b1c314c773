import pytest

from krizconf.cohomology import Engine
from krizconf.ring import elliptic_curve_ring


@pytest.fixture(scope="session")
def R():
    return elliptic_curve_ring()


@pytest.fixture(scope="session")
def engine(R):
    return Engine(R)
