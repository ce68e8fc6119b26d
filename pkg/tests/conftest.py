import numpy as np
import pytest

from gqkit.constructions.quadrics import build_elliptic, build_parabolic
from gqkit.galois import make_field
from gqkit.suites import SuiteConfig, context


@pytest.fixture(scope="session")
def gf3():
    return make_field(3, 1)


@pytest.fixture(scope="session")
def gf9():
    return make_field(3, 2)


@pytest.fixture(scope="session")
def q43(gf3):
    return build_parabolic(gf3)


@pytest.fixture(scope="session")
def q53(gf3):
    return build_elliptic(gf3)


@pytest.fixture(scope="session")
def kk9():
    """Shared lazily built objects for the Kantor-Knuth quadrangle at q = 9, x -> x^3."""
    return context(SuiteConfig("", q=9, sigma=1))


def grid_geometry(n):
    """The n x n grid: rows are lines 0..n-1, columns lines n..2n-1."""
    from gqkit.incidence import Geometry

    ids = np.arange(n * n).reshape(n, n)
    return Geometry(list(ids) + list(ids.T), n * n)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance")
        for line in LINES:
            terminalreporter.write_line(line)
