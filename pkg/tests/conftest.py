import numpy as np
import pytest

from helmholtz_bie.geometry import Domain, annulus, build_grid, kite, unit_disk

J01 = 2.404825557695773
J11 = 3.831705970207512
JP11 = 1.841183781340659
JP21 = 3.054236928227140

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def disk():
    return unit_disk()


@pytest.fixture(scope="session")
def kite_domain():
    return Domain((kite(),))


@pytest.fixture(scope="session")
def annulus_domain():
    return annulus(2.0, 1.0)


@pytest.fixture(scope="session")
def disk128(disk):
    return build_grid(disk, 128)


@pytest.fixture(scope="session")
def kite128(kite_domain):
    return build_grid(kite_domain, 128)


@pytest.fixture(scope="session")
def annulus64(annulus_domain):
    return build_grid(annulus_domain, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
