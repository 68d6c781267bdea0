import pytest

from ernst_disk import DiskParams, SolutionContext


@pytest.fixture(scope="session")
def params():
    return DiskParams(1.0, 0.3)


@pytest.fixture(scope="session")
def ctx(params):
    return SolutionContext(params, 1e-12)
