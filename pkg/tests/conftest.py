import pytest

from dessins import connected_gf, partition_function


@pytest.fixture(scope="session")
def gf6():
    return connected_gf(6)


@pytest.fixture(scope="session")
def z6():
    return partition_function(6)
