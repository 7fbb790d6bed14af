import numpy as np
import pytest

from adslab.hull import fuchsian_config
from adslab.rigidity import edge_variation_matrix, prepare_surface
from adslab.surface_group import build_fuchsian_rep


@pytest.fixture(scope="session")
def rho2():
    return build_fuchsian_rep(2)


@pytest.fixture(scope="session")
def surfaces(rho2):
    """Prepared k=2 surfaces keyed by (geometry, side, n)."""
    cache = {}

    def get(geometry, side, n=1):
        key = (geometry, side, n)
        if key not in cache:
            cache[key] = prepare_surface(fuchsian_config(geometry, rho2, side, n))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def ads_pair(surfaces):
    return edge_variation_matrix([surfaces("ads", 1), surfaces("ads", -1)])


@pytest.fixture(scope="session")
def mink_pair(surfaces):
    return edge_variation_matrix([surfaces("mink", 1), surfaces("mink", -1)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1][len("test_criterion_"):]
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[name] = _CRITERIA.get(name, "PASS") if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        num, _, label = name.partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d} {_CRITERIA[name]}  {label.replace('_', ' ')}")
