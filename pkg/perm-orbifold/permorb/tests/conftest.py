import pytest

from permorb.services.modular_data import fibonacci, holomorphic, ising, z_n
from permorb.services.scalars import precision_scope


@pytest.fixture(scope="session", autouse=True)
def precision():
    with precision_scope(50) as digits:
        yield digits


@pytest.fixture
def ising_md(precision):
    return ising()


@pytest.fixture
def fibonacci_md(precision):
    return fibonacci()


@pytest.fixture
def holomorphic_md(precision):
    return holomorphic(8)


@pytest.fixture
def z3_md(precision):
    return z_n(3)
