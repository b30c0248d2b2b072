import pytest

from sprays.catalog import cantor_string, pluriphase_sample, sierpinski_gasket, worked_example
from sprays.spray import Spray


@pytest.fixture
def worked():
    return worked_example()


@pytest.fixture
def cantor():
    return cantor_string()


@pytest.fixture
def gasket():
    return sierpinski_gasket()


@pytest.fixture
def pluriphase():
    return pluriphase_sample()


@pytest.fixture(scope="session")
def worked_spray():
    return Spray(worked_example())


@pytest.fixture(scope="session")
def cantor_spray():
    return Spray(cantor_string())
