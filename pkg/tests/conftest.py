import pathlib

import pytest

from netgains import BitMatrix, GeneratorSet, generate_points
from netgains.samples import shift_net, sobol_net

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def shift():
    return shift_net()


@pytest.fixture(scope="session")
def shift_points(shift):
    return generate_points(shift)


@pytest.fixture(scope="session")
def sobol2d():
    return sobol_net(2, 4)


@pytest.fixture(scope="session")
def sobol2d_points(sobol2d):
    return generate_points(sobol2d)


@pytest.fixture(scope="session")
def identity_net():
    def make(m: int, s: int = 1) -> GeneratorSet:
        return GeneratorSet((BitMatrix.identity(m),) * s)

    return make


@pytest.fixture()
def data_dir():
    return DATA
